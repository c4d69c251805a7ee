"""Figure rendering for the CLI report commands.

matplotlib is imported lazily with the Agg backend so the library itself
never needs a display.
"""

from __future__ import annotations

from fractions import Fraction

KEPT_COLOR = "#3b6fb6"
DELETED_COLOR = "#d1453b"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def window_segments(N: int, a, b):
    """Kept and deleted pieces of each cell of ``S(N)`` meeting ``[a, b)``.

    Returns dicts with ``lo, hi, cell, residue, member``; together they tile
    ``[a, b)``.
    """
    from .construction import cell, cell_residue, forbidden_interval
    from .intervals import IntervalSet

    a, b = Fraction(a), Fraction(b)
    span = IntervalSet.interval(a, b)
    rows = []
    for m in range(a.numerator // a.denominator, -((-b.numerator) // b.denominator)):
        i = cell_residue(N, m)
        pieces = [(lo, hi, True) for lo, hi in cell(N, m).intersect(span)]
        pieces += [(lo, hi, False) for lo, hi in forbidden_interval(N, m).intersect(span)]
        for lo, hi, member in sorted(pieces):
            rows.append({"lo": lo, "hi": hi, "cell": m, "residue": i, "member": member})
    return rows


def render_window(segments, path, title=None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(10, 1.8))
    for seg in segments:
        lo, hi = float(seg["lo"]), float(seg["hi"])
        color = KEPT_COLOR if seg["member"] else DELETED_COLOR
        ax.axvspan(lo, hi, ymin=0.3, ymax=0.7, color=color, lw=0)
    cells = sorted({seg["cell"] for seg in segments})
    for m in cells:
        ax.axvline(m, color="0.2", lw=0.6)
    if segments:
        ax.set_xlim(float(segments[0]["lo"]), float(segments[-1]["hi"]))
    ax.set_yticks([])
    for side in ("left", "right", "top"):
        ax.spines[side].set_visible(False)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_equidist(diag, path, title=None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3))
    freqs = [float(f) for f in diag.frequencies]
    ax.bar(range(diag.N), freqs, color=KEPT_COLOR, width=0.8)
    ax.axhline(1 / diag.N, color=DELETED_COLOR, lw=1, ls="--")
    ax.set_xticks(range(diag.N))
    ax.set_xlabel("subinterval index")
    ax.set_ylabel("frequency")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
