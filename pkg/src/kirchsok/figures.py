"""Figures for the reproduction report, written as PNG files."""

from __future__ import annotations

import os

import numpy as np

from .kirchhoff import build_reduced_model
from .numerics import compile_polynomials, integrate
from .stability import cylinder_equilibrium, fullspace_linearization, reduced_1d_stability


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render(directory: str, ctx: dict, seed: int) -> list[str]:
    """Write the report figures into ``directory`` and return their paths."""
    os.makedirs(directory, exist_ok=True)
    plt = _pyplot()
    out = []

    if "drift_trajectory" in ctx:
        tr, ints, p = ctx["drift_trajectory"]
    else:
        f, ints = build_reduced_model()
        p = {"alpha": 1.0}
        rng = np.random.default_rng(seed)
        tr = integrate(f, rng.uniform(-0.8, 0.8, size=6), 10.0, params=p, save_every=10)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for I in ints:
        fn = compile_polynomials([I.expression], tr.variables, p)
        vals = np.array([fn(x)[0] for x in tr.states])
        rel = np.abs(vals - vals[0]) / max(abs(vals[0]), 1e-300)
        ax.semilogy(tr.times, np.maximum(rel, 1e-18), label=I.name)
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    ax.legend()
    ax.set_title("RK4, step 1e-3")
    path = os.path.join(directory, "integral_drift.png")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    out.append(path)

    params = {"alpha": 1, "l0": 1, "l1": 1, "l3": 1}
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for a, style in ((1, "-"), (-1, "--")):
        pa = dict(params, alpha=a)
        eq = float(reduced_1d_stability(pa)[0].equilibrium)
        from .report import _vectorize

        fn = _vectorize(pa, "minus")
        for d in (-1e-2, 1e-2):
            try:
                tr1 = integrate(fn, [eq + d], 10.0 if a < 0 else 100.0, step=1e-2, variables=("s2",))
            except Exception:
                continue
            y = tr1.states[:, 0]
            keep = np.isfinite(y) & (np.abs(y - eq) < 10)
            ax.plot(tr1.times[keep], y[keep] - eq, style, label=f"alpha={a}, offset {d:+g}")
    ax.set_xlabel("t")
    ax.set_ylabel("s2 - equilibrium")
    ax.set_ylim(-0.05, 0.05)
    ax.set_xlim(0, 20)
    ax.legend(fontsize=7)
    path = os.path.join(directory, "reduced_flow.png")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    out.append(path)

    rep = fullspace_linearization(cylinder_equilibrium(params), params)
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.axvline(0, color="0.6", lw=0.8)
    ax.scatter([r.real for r in rep.roots], [r.imag for r in rep.roots])
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title("linearization spectrum")
    path = os.path.join(directory, "spectrum.png")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    out.append(path)
    return out
