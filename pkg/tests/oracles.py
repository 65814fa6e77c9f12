"""Independent reference implementations, written with plain loops over lists."""
import itertools
import math


def _half_up(x):
    return int(math.floor(x + 0.5))


def _col(rows, j):
    return [r[j] for r in rows]


def envelope_oracle(rows, trim="retained"):
    """Six statistics per feature by sorting each column and summing ranks explicitly."""
    n = len(rows)
    out = {k: [] for k in ("mean", "median", "trimmed_mean", "std", "iqr", "mad")}
    for j in range(len(rows[0])):
        col = _col(rows, j)
        s = sorted(col)
        mean = sum(col) / n
        out["mean"].append(mean)
        out["median"].append(s[(n + 1) // 2 - 1] if n % 2 else (s[n // 2 - 1] + s[n // 2]) / 2)
        k = _half_up(0.25 * n)
        lo, hi = min(max(k, 1), n), min(max(n - k, 1), n)
        if n <= 2 or hi < lo:
            lo, hi = 1, n
        total = 0.0
        for rank in range(lo, hi + 1):
            total += s[rank - 1]
        out["trimmed_mean"].append(total / ((hi - lo + 1) if trim == "retained" else n))
        out["std"].append(math.sqrt(sum((v - mean) ** 2 for v in col) / (n - 1)) if n > 1 else 0.0)
        q1 = min(max(_half_up(0.25 * n), 1), n)
        q3 = min(max(_half_up(0.75 * n), 1), n)
        out["iqr"].append(s[q3 - 1] - s[q1 - 1])
        out["mad"].append(sum(abs(v - mean) for v in col) / n)
    return out


def best_partition(points, q):
    """Exhaustive search over all assignments of points to q non-empty groups minimizing SSE."""
    best = None
    n = len(points)
    for labels in itertools.product(range(q), repeat=n):
        if len(set(labels)) != q:
            continue
        total = 0.0
        groups = []
        for k in range(q):
            members = [points[i] for i in range(n) if labels[i] == k]
            dim = len(members[0])
            c = [sum(m[d] for m in members) / len(members) for d in range(dim)]
            total += sum(sum((m[d] - c[d]) ** 2 for d in range(dim)) for m in members)
            groups.append(tuple(sorted(tuple(m) for m in members)))
        if best is None or total < best[0] - 1e-15:
            best = (total, sorted(groups))
    return best


def lattice_oracle(step):
    n = round(1 / step)
    return [(i / n, j / n, k / n) for i in range(n + 1) for j in range(n + 1) for k in range(n + 1)
            if i + j + k == n]
