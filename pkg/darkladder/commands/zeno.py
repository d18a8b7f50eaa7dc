#!/usr/bin/env python3

"""Zeno factor table of the dark-state ladder."""

import logging
import os

from darkladder.commands.common import command_dir, finish
from darkladder.darkstate.analytics import params_for_rungs, verify_darkness, zeno_ladder
from darkladder.utils import plots
from darkladder.utils.io import write_csv
from darkladder.utils.units import mhz_to_rad_us, params_from_cfg, rad_us_to_mhz

logger = logging.getLogger(__name__)

NAME = "zeno"


def run(cfg, disable_progress=False):
    out_dir = command_dir(cfg, NAME)
    n_max = cfg["ZENO"]["N_MAX"]
    base = params_from_cfg(cfg)

    rows, bars, summary = [], {}, {}
    for omega23_mhz in cfg["ZENO"]["OMEGA23_LIST"]:
        params = base.replace(omega23=mhz_to_rad_us(omega23_mhz))
        ladder = zeno_ladder(params, n_max)
        # Golden-rule rates from overlaps, one rung above n_max so every row is checked.
        report = verify_darkness(params_for_rungs(params.g, params.omega23, fock_cutoff=n_max + 1))
        mismatch = {r["n"]: r["fgr_mismatch"] for r in report.rungs}
        for p in ladder:
            rows.append([omega23_mhz, p.n, rad_us_to_mhz(p.gamma_n), rad_us_to_mhz(p.omega_n),
                         p.zeno, p.zeno_rel, abs(mismatch[p.n])])
        bars[f"Omega23/2pi = {omega23_mhz:g} MHz"] = [p.zeno_rel for p in ladder]
        if n_max >= 2:
            summary[f"zeno_rel_2_at_{omega23_mhz:g}mhz"] = ladder[1].zeno_rel
        summary[f"max_golden_rule_mismatch_{omega23_mhz:g}mhz"] = max(abs(mismatch[p.n]) for p in ladder)

    write_csv(
        os.path.join(out_dir, "zeno.csv"),
        "zeno-ladder",
        ["omega23_mhz", "n", "gamma_n_mhz", "omega_n_mhz", "zeno", "zeno_rel", "golden_rule_mismatch"],
        rows,
    )
    if cfg["EMIT_PLOTS"]:
        plots.bar_chart(os.path.join(out_dir, "zeno.svg"), list(range(1, n_max + 1)), bars,
                        "rung n", "Z_n / Z_1")
    return finish(cfg, NAME, summary)
