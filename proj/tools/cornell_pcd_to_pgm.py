#!/usr/bin/env python3
"""Convert the Cornell grasping dataset into the layout the loader reads.

For every pcdNNNN.txt point cloud this writes pcdNNNNd.pgm (16-bit depth,
640x480, "# depth_scale_m" header) next to copies of the cpos/cneg label
files, plus objects.csv mapping scene ids to object ids when z.txt (the
dataset's background/object mapping) is present.

    python3 tools/cornell_pcd_to_pgm.py --src ~/cornell --dst data/cornell

Depth is the Euclidean distance of each point, as in the GG-CNN loader.
Cornell point clouds are in millimeters; pass --scale if yours differ.
Pixels with no point stay 0 (missing) and are inpainted at load time.
"""

import argparse
import pathlib
import shutil
import sys

import numpy as np

WIDTH, HEIGHT = 640, 480


def read_pcd_depth(path, units_to_m):
    depth = np.zeros((HEIGHT, WIDTH), dtype=np.float64)
    in_data = False
    with open(path) as f:
        for line in f:
            if not in_data:
                if line.startswith("DATA"):
                    in_data = True
                continue
            parts = line.split()
            if len(parts) < 5:
                continue
            x, y, z = (float(v) for v in parts[:3])
            index = int(parts[4])
            row, col = divmod(index, WIDTH)
            if 0 <= row < HEIGHT:
                depth[row, col] = np.sqrt(x * x + y * y + z * z) * units_to_m
    return depth


def write_pgm(path, depth_m, scale):
    units = np.zeros(depth_m.shape, dtype=">u2")
    valid = np.isfinite(depth_m) & (depth_m > 0)
    units[valid] = np.clip(np.rint(depth_m[valid] / scale), 1, 65535)
    with open(path, "wb") as f:
        f.write(f"P5\n# depth_scale_m {scale}\n{WIDTH} {HEIGHT}\n65535\n".encode())
        f.write(units.tobytes())


def read_objects(z_txt):
    # "<image number> <object id> <description> ..." per line.
    mapping = {}
    for line in z_txt.read_text().splitlines():
        parts = line.split()
        if len(parts) >= 2 and parts[0].isdigit():
            mapping[f"pcd{int(parts[0]):04d}"] = f"obj{int(parts[1]):03d}"
    return mapping


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--src", required=True, type=pathlib.Path, help="extracted Cornell directory (searched recursively)")
    ap.add_argument("--dst", required=True, type=pathlib.Path)
    ap.add_argument("--scale", type=float, default=0.001, help="meters per point-cloud unit (default mm)")
    ap.add_argument("--depth-scale", type=float, default=0.001, help="meters per PGM unit")
    args = ap.parse_args()

    args.dst.mkdir(parents=True, exist_ok=True)
    clouds = sorted(p for p in args.src.rglob("pcd[0-9][0-9][0-9][0-9].txt"))
    if not clouds:
        sys.exit(f"no pcdNNNN.txt files under {args.src}")

    objects = {}
    for z in args.src.rglob("z.txt"):
        objects.update(read_objects(z))

    for n, cloud in enumerate(clouds, 1):
        sid = cloud.stem
        write_pgm(args.dst / f"{sid}d.pgm", read_pcd_depth(cloud, args.scale), args.depth_scale)
        for suffix in ("cpos.txt", "cneg.txt"):
            label = cloud.with_name(sid + suffix)
            if label.exists():
                shutil.copyfile(label, args.dst / label.name)
        if n % 50 == 0:
            print(f"{n}/{len(clouds)}", file=sys.stderr)

    if objects:
        lines = ["scene_id,object_id"] + [f"{c.stem},{objects.get(c.stem, c.stem)}" for c in clouds]
        (args.dst / "objects.csv").write_text("\n".join(lines) + "\n")
    print(f"converted {len(clouds)} scenes into {args.dst}")


if __name__ == "__main__":
    main()
