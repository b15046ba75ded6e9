#!/usr/bin/env python3
"""Generate the high-precision reference tables committed under tests/data/.

Run once with mpmath at 50 decimal digits; the JSON outputs are frozen into
the repository and the test suite checks the library against them. The
log-gamma grid avoids the zeros of ln-gamma at x = 1 and x = 2, where relative
error is not a meaningful measure (absolute accuracy there is covered by unit
tests instead).

Usage: python3 tools/gen_reference_tables.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"


def log_gamma_table() -> dict:
    xs = []
    # 12 points per decade, 1e-3 .. 1e6, skipping the neighbourhoods of the
    # two zeros of ln-gamma where relative error is ill-conditioned.
    for k in range(12 * 9 + 1):
        x = mp.mpf(10) ** (mp.mpf(-3) + mp.mpf(k) / 12)
        if abs(x - 1) < mp.mpf("0.08") or abs(x - 2) < mp.mpf("0.12"):
            continue
        xs.append(x)
    xs += [mp.mpf(v) for v in
           ("0.5", "1.5", "2.5", "3.5", "9", "10", "27", "84", "111",
            "1e4", "123456.789", "1e6")]
    entries = [
        {"x": mp.nstr(x, 17), "log_gamma": mp.nstr(mp.loggamma(x), 25)}
        for x in sorted(set(xs))
    ]
    return {"digits": 50, "entries": entries}


def incomplete_beta_table() -> dict:
    params = [(1, 1), (0.5, 0.5), (2, 9), (3, 7), (2, 2), (27, 84),
              (9, 2), (0.5, 4), (150, 350)]
    xs = ["0.001", "0.01", "0.1", "0.182", "0.25", "0.3333", "0.5",
          "0.75", "0.9", "0.99", "0.999"]
    entries = []
    for a, b in params:
        for xs_s in xs:
            x = mp.mpf(xs_s)
            v = mp.betainc(mp.mpf(a), mp.mpf(b), 0, x, regularized=True)
            entries.append({
                "a": a, "b": b, "x": xs_s, "value": mp.nstr(v, 25),
            })
    return {"digits": 50, "entries": entries}


def beta_quantile_fixtures() -> dict:
    # Equal-tailed 95% endpoints for Beta(27, 84), found by root-solving the
    # regularized incomplete beta at 50 digits.
    def quantile(q, a, b):
        target = mp.mpf(q)
        lo, hi = mp.mpf(0), mp.mpf(1)
        for _ in range(200):
            mid = (lo + hi) / 2
            if mp.betainc(a, b, 0, mid, regularized=True) < target:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    a, b = mp.mpf(27), mp.mpf(84)
    return {
        "beta_27_84": {
            "q_0.025": mp.nstr(quantile("0.025", a, b), 25),
            "q_0.975": mp.nstr(quantile("0.975", a, b), 25),
        }
    }


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "log_gamma_reference.json").write_text(
        json.dumps(log_gamma_table(), indent=1) + "\n")
    (OUT_DIR / "incomplete_beta_reference.json").write_text(
        json.dumps(incomplete_beta_table(), indent=1) + "\n")
    (OUT_DIR / "beta_quantile_fixtures.json").write_text(
        json.dumps(beta_quantile_fixtures(), indent=1) + "\n")
    print(f"wrote reference tables to {OUT_DIR}")


if __name__ == "__main__":
    main()
