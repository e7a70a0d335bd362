"""Estimators against bounds in a short Bayesian sweep.

The MMSE estimator is the posterior mean, so it is optimal for the Euclidean
error, yet it stays well above the Euclidean bound at large n.
Measured in the natural distance it nearly attains the intrinsic bound.
"""
from hpdbounds.experiments import ExperimentConfig, run_sweep

cfg = ExperimentConfig(nu=40, n_grid=(10, 119, 1394), n_trials=300, seed=1, estimators=("MAP", "MMSE"))
rows = {(r.metric, r.series, r.n): r for r in run_sweep(cfg, workers=2)}

for metric, bound in (("euclidean", "BCRB"), ("ai", "BICRB")):
    print(f"\n{metric} error")
    for n in cfg.n_grid:
        mmse = rows[(metric, "MMSE", n)]
        b = rows[(metric, bound, n)].value
        print(f"  n={n:5d}  MAP {rows[(metric, 'MAP', n)].value:.5f}  MMSE {mmse.value:.5f} "
              f"(+-{mmse.std_err:.5f})  {bound} {b:.5f}  ratio {mmse.value / b:.3f}")
