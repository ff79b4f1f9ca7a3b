"""Print the jump/2 facts of knight.pl for an R x C board (squares numbered row by row)."""

import argparse

MOVES = [(-2, -1), (-2, 1), (-1, -2), (-1, 2), (1, -2), (1, 2), (2, -1), (2, 1)]


def jump_facts(rows: int, cols: int) -> list:
    def idx(r, c):
        return (r - 1) * cols + c

    facts = []
    for r in range(1, rows + 1):
        for c in range(1, cols + 1):
            for dr, dc in MOVES:
                rr, cc = r + dr, c + dc
                if 1 <= rr <= rows and 1 <= cc <= cols:
                    facts.append(f"jump({idx(r, c)}, {idx(rr, cc)}).")
    return facts


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("rows", type=int, nargs="?", default=5)
    ap.add_argument("cols", type=int, nargs="?", default=5)
    args = ap.parse_args()
    print("\n".join(jump_facts(args.rows, args.cols)))
