#!/usr/bin/env python3
"""Writes a hexahedral L-bracket in GMSH 2.2 ASCII format."""
import argparse


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--size", type=float, default=0.04, help="outer edge length (m)")
    ap.add_argument("--arm", type=float, default=0.016, help="arm thickness (m)")
    ap.add_argument("--depth", type=float, default=0.012, help="extrusion depth (m)")
    ap.add_argument("--h", type=float, default=0.004, help="cell size (m)")
    a = ap.parse_args()

    nx = round(a.size / a.h)
    na = round(a.arm / a.h)
    ny = round(a.depth / a.h)
    keep = lambda i, k: i < na or k < na

    nid = {}
    nodes = []
    for k in range(nx + 1):
        for j in range(ny + 1):
            for i in range(nx + 1):
                nid[i, j, k] = len(nodes) + 1
                nodes.append((i * a.h, j * a.h, k * a.h))

    hexes = []
    for k in range(nx):
        for j in range(ny):
            for i in range(nx):
                if not keep(i, k):
                    continue
                hexes.append([nid[i, j, k], nid[i + 1, j, k], nid[i + 1, j + 1, k], nid[i, j + 1, k],
                              nid[i, j, k + 1], nid[i + 1, j, k + 1], nid[i + 1, j + 1, k + 1], nid[i, j + 1, k + 1]])

    # boundary quads: faces of kept cells whose neighbor is missing
    cells = {(i, j, k) for k in range(nx) for j in range(ny) for i in range(nx) if keep(i, k)}
    quads = []
    for (i, j, k) in sorted(cells, key=lambda c: (c[2], c[1], c[0])):
        def face(di, dj, dk, corners):
            if (i + di, j + dj, k + dk) not in cells:
                quads.append([nid[c] for c in corners])
        face(-1, 0, 0, [(i, j, k), (i, j, k + 1), (i, j + 1, k + 1), (i, j + 1, k)])
        face(1, 0, 0, [(i + 1, j, k), (i + 1, j + 1, k), (i + 1, j + 1, k + 1), (i + 1, j, k + 1)])
        face(0, -1, 0, [(i, j, k), (i + 1, j, k), (i + 1, j, k + 1), (i, j, k + 1)])
        face(0, 1, 0, [(i, j + 1, k), (i, j + 1, k + 1), (i + 1, j + 1, k + 1), (i + 1, j + 1, k)])
        face(0, 0, -1, [(i, j, k), (i, j + 1, k), (i + 1, j + 1, k), (i + 1, j, k)])
        face(0, 0, 1, [(i, j, k + 1), (i + 1, j, k + 1), (i + 1, j + 1, k + 1), (i, j + 1, k + 1)])

    with open(a.out, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write('$PhysicalNames\n2\n2 1 "wall"\n3 2 "casting"\n$EndPhysicalNames\n')
        f.write(f"$Nodes\n{len(nodes)}\n")
        for n, (x, y, z) in enumerate(nodes, 1):
            f.write(f"{n} {x:.9g} {y:.9g} {z:.9g}\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(quads) + len(hexes)}\n")
        e = 1
        for q in quads:
            f.write(f"{e} 3 2 1 1 {' '.join(map(str, q))}\n")
            e += 1
        for h in hexes:
            f.write(f"{e} 5 2 2 2 {' '.join(map(str, h))}\n")
            e += 1
        f.write("$EndElements\n")


if __name__ == "__main__":
    main()
