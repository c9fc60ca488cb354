"""Optional plotting helper shared by the demos (matplotlib is not a hard dependency)."""
from pathlib import Path

OUT = Path(__file__).parent / "out"

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # demos still print their numbers
    plt = None


def show_field(field, title, name, cmap="viridis"):
    if plt is None:
        return None
    OUT.mkdir(exist_ok=True)
    a1, a2 = field.section.axes
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.imshow(field.values, origin="lower", extent=(a1.lo, a1.hi, a2.lo, a2.hi),
                   aspect="auto", cmap=cmap)
    ax.set_xlabel(a1.name)
    ax.set_ylabel(a2.name)
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    path = OUT / f"{name}.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    print(f"saved {path}")
    return path
