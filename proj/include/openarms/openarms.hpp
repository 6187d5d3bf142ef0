#pragma once

#include "openarms/arm_model.hpp"
#include "openarms/chain_config.hpp"
#include "openarms/cornell_data.hpp"
#include "openarms/ggrcnn/heuristic.hpp"
#include "openarms/ggrcnn/layers.hpp"
#include "openarms/ggrcnn/network.hpp"
#include "openarms/ggrcnn/weights.hpp"
#include "openarms/grasp_geometry.hpp"
#include "openarms/grasp_pipeline.hpp"
#include "openarms/ik_engine.hpp"
#include "openarms/rigid.hpp"
#include "openarms/rng.hpp"
#include "openarms/solve_bench.hpp"
#include "openarms/synthetic.hpp"
#include "openarms/teleop_service.hpp"
