# %% [markdown]
# # Training the four estimators and comparing ROC curves
#
# All schemes share one 95/5 split. The sample-average baseline scores every
# test link with the mean training indicator.

# %%
import warnings

from beampredict import mlp
from beampredict.scene import default_scene, generate_dataset
from beampredict.schemes import SchemeKind, evaluate_scheme, split_dataset, train_scheme

# library default; about a minute for all four schemes. Far fewer iterations
# leave the single-feature networks no better than the baseline.
MAX_ITERATIONS = 5000

samples = generate_dataset(default_scene(), seed=0)
manifest = split_dataset(samples, 0.95, seed=0)
config = mlp.TrainConfig(max_iterations=MAX_ITERATIONS)

# %%
results = {}
with warnings.catch_warnings():
    warnings.simplefilter("ignore", mlp.StepSizeWarning)
    for kind in SchemeKind:
        scheme, _ = train_scheme(kind, samples, 100, 10, config=config, manifest=manifest)
        results[kind] = evaluate_scheme(scheme, samples, manifest)

# %%
sa = results[SchemeKind.RSS].baseline_roc
print(f"rho_v = {results[SchemeKind.RSS].report.rho_v:.3f}   SA P_D at P_F=0.1: {sa.pd_at(0.1):.3f}")
for kind, ev in results.items():
    print(f"{kind.value:6s} rho_nn = {ev.report.rho_nn:.3f}   P_D at P_F=0.1: {ev.roc.pd_at(0.1):.3f}"
          f"   AUC {ev.roc.auc():.3f}")
