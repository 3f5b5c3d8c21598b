"""Command line entry point.

    clab <command> --scene PATH [--out DIR] [--grid N] [--lens Q2|Q3|Q4|Q5]
                   [--seed-density D]

Commands: verify, classify, trace, surfaces, render, report.  Artifacts are
written to a temporary directory next to the output directory and moved into
place only when the command succeeds.  Exit status is 0 on success, 1 when a
verification fails and 2 on scene or I/O errors.  ``CLAB_THREADS`` caps the
worker pool.
"""
from concurrent.futures import ThreadPoolExecutor
import argparse
import dataclasses
import os
import shutil
import sys
import tempfile

import numpy as np

from . import geom3d, svg
from .errors import ClabError, SceneError
from .foliation import PortraitSpec, portrait, write_curves
from .formfields import LENSES
from .scene import load_scene
from .singularities import REPORT_HEADER, classify_chart, write_reports
from .verify import run_identities, summary_line

COMMANDS = ("verify", "classify", "trace", "surfaces", "render", "report")


def threads():
    try:
        n = int(os.environ.get("CLAB_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(os.cpu_count() or 1, 8)


class Failed(Exception):
    """A command ran but its result is a failure (nonzero exit)."""


def _prefix(scene):
    return scene.outputs.get("prefix", "")


def _name(scene, base):
    p = _prefix(scene)
    return f"{p}_{base}" if p else base


def _portrait(scene, chart):
    spec = PortraitSpec(region=scene.region, seed_density=scene.seed_density, tol=scene.tolerance("trace"))
    return portrait(chart, spec, scene.lens)


def cmd_verify(scene, chart, work, log):
    res = run_identities(chart, scene.tolerances, scene.seed, region=scene.region)
    text = res.table()
    with open(os.path.join(work, _name(scene, "verify.txt")), "w") as fh:
        fh.write(text)
    log(text.rstrip("\n"))
    if not res.passed:
        raise Failed(summary_line(res))


def _classify(scene, chart):
    return classify_chart(chart, scene.grid, LENSES)


def cmd_classify(scene, chart, work, log):
    reports, umb = _classify(scene, chart)
    write_reports(reports, os.path.join(work, _name(scene, "singularities.tsv")))
    log(REPORT_HEADER)
    for r in reports:
        log(r.tsv())
    if umb.degenerate_everywhere:
        log("# every point is umbilic")
    else:
        log(f"# {len(umb)} umbilic(s), {len(reports)} report(s)")


def cmd_trace(scene, chart, work, log):
    p = _portrait(scene, chart)
    write_curves(p, work, _name(scene, "curve"))
    log(f"{len(p.curves)} curves, {len(p.loci)} loci, lens {p.lens}")


def cmd_surfaces(scene, chart, work, log):
    grid = min(scene.grid, 256)

    def one(kind):
        mesh = geom3d.sweep_surface(chart, kind, grid, scene.region)
        return geom3d.write_obj(mesh, work, _name(scene, kind.lower()))

    with ThreadPoolExecutor(threads()) as ex:
        written = list(ex.map(one, geom3d.KINDS))
    us = np.linspace(scene.region[0], scene.region[1], min(grid, 64))
    vs = np.linspace(scene.region[2], scene.region[3], min(grid, 64))
    geom3d.write_line_points_csv(chart, us, vs, os.path.join(work, _name(scene, "line_points.csv")))
    for kind, paths in zip(geom3d.KINDS, written):
        log(f"{kind}: " + ", ".join(os.path.basename(p) for p in paths))


def _lens_reports(reports, lens):
    return [r for r in reports if r.lens == lens or r.kind == "SigmaN"]


def cmd_render(scene, chart, work, log):
    with ThreadPoolExecutor(min(threads(), 2)) as ex:
        fp = ex.submit(_portrait, scene, chart)
        fr = ex.submit(_classify, scene, chart)
        p, (reports, _) = fp.result(), fr.result()
    shown = _lens_reports(reports, scene.lens)
    path = os.path.join(work, _name(scene, f"portrait_{scene.lens}.svg"))
    svg.write_svg(p, scene.region, path, shown, title=f"{chart.name} {scene.lens}")
    log(f"{os.path.basename(path)}: {len(p.curves)} curves, {len(p.loci)} loci, {len(shown)} points")


def cmd_report(scene, chart, work, log):
    res = run_identities(chart, scene.tolerances, scene.seed, region=scene.region)
    reports, umb = _classify(scene, chart)
    lines = [f"chart: {chart.name}", f"region: {list(scene.region)}", f"lens: {scene.lens}", ""]
    lines.append(summary_line(res))
    lines += [c.row() for c in res.checks]
    lines += [f"note: {n}" for n in res.notes]
    lines.append("")
    if umb.degenerate_everywhere:
        lines.append("umbilics: every point")
    else:
        lines.append(f"umbilics: {len(umb)}")
    counts = {}
    for r in reports:
        counts[(r.lens, r.label)] = counts.get((r.lens, r.label), 0) + 1
    for (lens, label), k in sorted(counts.items()):
        lines.append(f"  {lens} {label}: {k}")
    lines.append("")
    lines.append(REPORT_HEADER)
    lines += [r.tsv() for r in reports]
    text = "\n".join(lines) + "\n"
    with open(os.path.join(work, _name(scene, "report.txt")), "w") as fh:
        fh.write(text)
    log(text.rstrip("\n"))
    if not res.passed:
        raise Failed(summary_line(res))


HANDLERS = {
    "verify": cmd_verify,
    "classify": cmd_classify,
    "trace": cmd_trace,
    "surfaces": cmd_surfaces,
    "render": cmd_render,
    "report": cmd_report,
}


def run_command(cmd, scene, out, log=print):
    """Run one command; returns the exit status.  Nothing is left in ``out``
    unless the command succeeds."""
    chart = scene.build_chart()
    out = os.path.abspath(out)
    parent = os.path.dirname(out)
    os.makedirs(parent, exist_ok=True)
    work = tempfile.mkdtemp(prefix=".clab-", dir=parent)
    try:
        HANDLERS[cmd](scene, chart, work, log)
        os.makedirs(out, exist_ok=True)
        for name in sorted(os.listdir(work)):
            os.replace(os.path.join(work, name), os.path.join(out, name))
    except Failed as exc:
        print(f"clab {cmd}: {exc}", file=sys.stderr)
        return 1
    finally:
        shutil.rmtree(work, ignore_errors=True)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="clab", description="Binary differential equations of line congruences.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scene", required=True, help="scene JSON file")
        p.add_argument("--out", help="output directory (default: scene outputs.dir or ./clab-out)")
        p.add_argument("--grid", type=int, help="override the scene grid")
        p.add_argument("--lens", choices=LENSES, help="override the scene lens")
        p.add_argument("--seed-density", type=int, help="override the scene seed density")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        scene = load_scene(args.scene)
        changes = {}
        if args.grid is not None:
            if not 32 <= args.grid <= 4096:
                raise SceneError("--grid must be between 32 and 4096")
            changes["grid"] = args.grid
        if args.lens is not None:
            changes["lens"] = args.lens
        if args.seed_density is not None:
            if not 1 <= args.seed_density <= 256:
                raise SceneError("--seed-density must be between 1 and 256")
            changes["seed_density"] = args.seed_density
        scene = dataclasses.replace(scene, **changes)
        out = args.out or scene.outputs.get("dir") or "clab-out"
        return run_command(args.command, scene, out)
    except (ClabError, OSError, KeyError, ValueError) as exc:
        print(f"clab {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
