"""Aggregating a group of interval responses into an agreement function.

The agreement at any point of the scale is the fraction of respondents
whose interval covers that point. The result is a piecewise-constant
membership function: 1.0 where everybody agrees, stepping down where
answers diverge.
"""

from pathlib import Path

import numpy as np

from ivsurvey import Interval, ScaleSpec, build_agreement, round_to_integers
from ivsurvey.plots import PlotSpec, plot_iaa_svg, plot_intervals_svg

rng = np.random.default_rng(7)
scale = ScaleSpec(0.0, 40.0, "0 years", "40 years")

# Forty synthetic respondents reproduce the interval [20, 30] with noise.
responses = []
for _ in range(40):
    lo = 20.0 + rng.normal(0, 1.2)
    hi = 30.0 + rng.normal(0, 1.2)
    lo, hi = sorted((max(lo, 0.0), min(hi, 40.0)))
    responses.append(Interval(lo, hi))

# Plots of integer-valued scales usually round endpoints first.
rounded = round_to_integers(responses)
af = build_agreement(rounded)

print(f"{af.n} intervals, support {af.support}")
print("membership at 25 :", af.membership(25.0))
print("membership at 18 :", af.membership(18.0))
print("peak agreement   :", af.max_membership)
print("mean width       :", round(af.integral(), 2))

print("\nx  membership")
for x, m in af.discretize(2.0, start=scale.min, stop=scale.max):
    bar = "#" * int(round(m * 30))
    print(f"{x:4.0f} {m:5.3f} {bar}")

out = Path("demo_output")
out.mkdir(exist_ok=True)
(out / "agreement_stack.svg").write_text(
    plot_intervals_svg(rounded, scale, PlotSpec(style="interval_stack"))
)
(out / "agreement_function.svg").write_text(plot_iaa_svg(af, scale, PlotSpec(style="iaa")))
print(f"\nwrote {out}/agreement_stack.svg and {out}/agreement_function.svg")
