#!/usr/bin/env python3
"""Regenerates the bundled ASCII worlds under worlds/."""
import random
import sys
from pathlib import Path

RES = 0.05


def blank(w_m, h_m):
    w, h = round(w_m / RES), round(h_m / RES)
    grid = [[False] * w for _ in range(h)]
    for x in range(w):
        grid[0][x] = grid[h - 1][x] = True
    for y in range(h):
        grid[y][0] = grid[y][w - 1] = True
    return grid


def box(grid, x0, y0, x1, y1, value=True):
    # metres, y up; rows are written top first later
    h, w = len(grid), len(grid[0])
    for y in range(round(y0 / RES), min(round(y1 / RES), h)):
        for x in range(round(x0 / RES), min(round(x1 / RES), w)):
            grid[y][x] = value


def write(grid, path):
    with open(path, "w") as f:
        f.write(f"resolution {RES}\n")
        for row in reversed(grid):
            f.write("".join("#" if c else "." for c in row) + "\n")


def rooms_small():
    g = blank(16.0, 12.0)
    t = 0.1
    # corridor between y = 5 and y = 7
    box(g, 0, 5.0, 16, 5.0 + t)
    box(g, 0, 7.0, 16, 7.0 + t)
    # three rooms below, four above
    for x in (5.3, 10.6):
        box(g, x, 0, x + t, 5.0)
    for x in (4.0, 8.0, 12.0):
        box(g, x, 7.0, x + t, 12.0)
    for cx in (2.6, 8.0, 13.3):
        box(g, cx - 0.5, 5.0, cx + 0.5, 5.0 + t, False)
    for cx in (2.0, 6.0, 10.0, 14.0):
        box(g, cx - 0.5, 7.0, cx + 0.5, 7.0 + t, False)
    # furniture
    box(g, 1.5, 1.5, 2.5, 2.3)
    box(g, 12.5, 9.5, 13.3, 10.8)
    box(g, 7.2, 1.0, 8.8, 1.6)
    return g


def maze(seed=7, cells=6, pitch=1.6):
    size = cells * pitch
    g = blank(size, size)
    rng = random.Random(seed)
    seen = {(0, 0)}
    stack = [(0, 0)]
    open_walls = set()
    while stack:
        cx, cy = stack[-1]
        nbs = [(cx + dx, cy + dy) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
               if 0 <= cx + dx < cells and 0 <= cy + dy < cells and (cx + dx, cy + dy) not in seen]
        if not nbs:
            stack.pop()
            continue
        n = rng.choice(nbs)
        open_walls.add(frozenset(((cx, cy), n)))
        seen.add(n)
        stack.append(n)
    t = 0.1
    for cx in range(cells):
        for cy in range(cells):
            if cx + 1 < cells and frozenset(((cx, cy), (cx + 1, cy))) not in open_walls:
                x = (cx + 1) * pitch
                box(g, x, cy * pitch, x + t, (cy + 1) * pitch + t)
            if cy + 1 < cells and frozenset(((cx, cy), (cx, cy + 1))) not in open_walls:
                y = (cy + 1) * pitch
                box(g, cx * pitch, y, (cx + 1) * pitch + t, y + t)
    return g


if __name__ == "__main__":
    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "worlds")
    out.mkdir(parents=True, exist_ok=True)
    write(rooms_small(), out / "closed_rooms_small.world")
    write(maze(), out / "closed_maze.world")
