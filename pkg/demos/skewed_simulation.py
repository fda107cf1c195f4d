"""
Two skewed classes: translation network versus linear logistic regression
==========================================================================

Both classes come from bivariate S_U laws. The network fits one
translation per class and dimension, then learns its output weights by
Newton's method; the baseline is multinomial logistic regression on the
raw inputs. The 0.5 posterior contour of the network bends with the data
while the baseline's is a straight line.
"""

import numpy as np

from jsnet import generate, llr_fit, llr_predict, predict, table_preset
from jsnet.grid import collinearity_residual, level_set_points, posterior_grid
from jsnet.harness import posterior_fn
from jsnet.trainer import fit

spec = table_preset(samples_per_class=100, seed=1)
train = generate(spec)
test = generate(spec.with_samples(10_000, seed=[1, 1]))
print("training points per class:", train.counts(), " test points per class:", test.counts())

net = fit(train)
base = llr_fit(train)

acc_net = np.mean(predict(net, test.X)[0] == test.labels)
acc_llr = np.mean(np.argmax(llr_predict(base, test.X), axis=1) == test.labels)
print(f"accuracy: network {100 * acc_net:.2f}%  logistic regression {100 * acc_llr:.2f}%")

# 0.5 contour of the class-1 posterior on the unit square
for name, model in (("network", net), ("logistic", base)):
    axis, P = posterior_grid(posterior_fn(model), 0.0, 1.0, 0.01)
    pts = level_set_points(axis, P[:, :, 0])
    print(f"{name:9s} contour: {len(pts):4d} crossings, max distance from best line {collinearity_residual(pts):.3g}")

# a coarse text rendering of the network posterior (rows: x2 from 1 down to 0)
axis, P = posterior_grid(posterior_fn(net), 0.0, 1.0, 0.05)
shades = " .:-=+*#%@"
for row in P[::-1, :, 0]:
    print("".join(shades[min(int(p * len(shades)), len(shades) - 1)] for p in row))
