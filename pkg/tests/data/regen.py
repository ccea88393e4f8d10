"""Regenerate the frozen golden inputs and outputs in this directory.

Run from the repository root: ``python3 tests/data/regen.py``. The goldens
are only regenerated deliberately; the tests compare against the frozen
bytes.
"""

from pathlib import Path

from usdsilo import cli
from usdsilo.serialization import format_float
from usdsilo.synthetic import make_world

HERE = Path(__file__).parent


def quotes_csv(route: str) -> str:
    world = make_world()
    tenor = world.tenor
    lines = ["instrument,maturityYears,value", "FREQ,0,4", f"FXSPOT,0,{format_float(0.0125)}"]
    mats = [format_float(t) for t in tenor.pillars]
    if route == "libor":
        q = world.libor_quotes()
        usd = world.usd_par_rates()
        lois = world.curves.usd.spreads_on(tenor)
        cols = [("IRS", q.irs_par_rates), ("MTMCCS", q.ccs_basis), ("USDOIS", usd), ("USDLOIS", lois)]
    else:
        q = world.ois_quotes()
        usd = world.usd_par_rates()
        lois = world.curves.usd.spreads_on(tenor)
        cols = [("OIS", q.ois_par_rates), ("MTMCCOIS", q.ccois_basis), ("USDOIS", usd), ("USDLOIS", lois)]
    for name, values in cols:
        lines += [f"{name},{m},{format_float(float(v))}" for m, v in zip(mats, values)]
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    for route in ("libor", "ois"):
        (HERE / f"golden_quotes_{route}.csv").write_text(quotes_csv(route))
        cli.main(["build-curves", "--quotes", str(HERE / f"golden_quotes_{route}.csv"),
                  "--out", str(HERE / f"golden_curves_{route}.json")])
    cli.main(["simulate", "--model", str(HERE / "golden_model.json"),
              "--out", str(HERE / "golden_simulate.json")])
