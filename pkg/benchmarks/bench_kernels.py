"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 20]

Each kernel is timed on LeNet-sized inputs for a 10-image bag; the last row
times one full training step of the DSMIL model with each backend.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from dsmil import kernels


def kernel_cases(rng):
    x1 = rng.standard_normal((10, 1, 28, 28))
    w1 = rng.standard_normal((20, 1, 5, 5))
    x2 = rng.standard_normal((10, 20, 12, 12))
    w2 = rng.standard_normal((50, 20, 5, 5))
    b1, b2 = rng.standard_normal(20), rng.standard_normal(50)
    g1 = rng.standard_normal((10, 20, 24, 24))
    g2 = rng.standard_normal((10, 50, 8, 8))
    pool_in = rng.standard_normal((10, 20, 24, 24))
    n = 430_000
    p, g, m, v = rng.standard_normal(n), rng.standard_normal(n), np.zeros(n), np.zeros(n)
    return {
        "conv1 forward": lambda k: k.conv2d_forward(x1, w1, b1, 1),
        "conv1 backward": lambda k: k.conv2d_backward(g1, x1, w1, 1),
        "conv2 forward": lambda k: k.conv2d_forward(x2, w2, b2, 1),
        "conv2 backward": lambda k: k.conv2d_backward(g2, x2, w2, 1),
        "maxpool forward": lambda k: k.maxpool2d_forward(pool_in, 2, 2),
        "adam update (430k)": lambda k: k.adam_update(p, g, m, v, 1e-4, 0.9, 0.999, 1e-8, 0.1, 0.001),
    }


STEP = """
import numpy as np, timeit
from dsmil import model as M
from dsmil.data import Bag
from dsmil.optim import Adam
rng = np.random.default_rng(0)
model = M.DSMIL(M.LeNetExtractor(rng=rng), rng=rng)
opt = Adam(model.parameters())
bag = Bag("b", 1, rng.random((10, 28, 28)))
def step():
    opt.zero_grad()
    M.T.backward(M.mse_loss(model.bag_logit(bag), 1))
    opt.step()
step()
print(min(timeit.repeat(step, number=1, repeat={repeat})))
"""


def training_step(backend, repeat):
    # backend choice happens at import, so each one gets a fresh interpreter
    env = dict(os.environ, DSMIL_KERNELS=backend)
    out = subprocess.run([sys.executable, "-c", STEP.format(repeat=repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    found = kernels.backends()
    names = [n for n in ("cython", "python") if n in found]
    if "cython" not in found:
        print("compiled kernels are not built; timing the fallback only")
    cases = kernel_cases(np.random.default_rng(0))
    header = f"{'kernel':<22}" + "".join(f"{n + ' (ms)':>15}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, fn in cases.items():
        times = [min(timeit.repeat(lambda: fn(found[n]), number=1, repeat=args.repeat)) * 1e3 for n in names]
        row = f"{label:<22}" + "".join(f"{t:>15.3f}" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)
    times = [training_step(n, max(3, args.repeat // 4)) * 1e3 for n in names]
    row = f"{'lenet dsmil step':<22}" + "".join(f"{t:>15.3f}" for t in times)
    if len(times) == 2:
        row += f"{times[1] / times[0]:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
