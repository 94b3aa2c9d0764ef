"""``censemble`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

import argparse
import csv
import io
import logging
import os
import sys
import warnings

import numpy as np

from . import analysis, plots, transforms
from .config import load_config
from .errors import CensembleError
from .pipeline import CACHE_ENV, compute_corpus, read_manifest
from .store import read_matrix, write_matrix, zscore_matrix

log = logging.getLogger("censemble")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _csv_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_table(path, header, rows):
    fh, close = _csv_out(path)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if close:
            fh.close()


def _num(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _features(m, spec):
    """``all``, ``baseline`` (b_gif_1 only) or a comma-separated id list."""
    if spec in (None, "all"):
        return None
    if spec == "baseline":
        return ["b_gif_1"]
    ids = [s.strip() for s in spec.split(",") if s.strip()]
    missing = [f for f in ids if f not in m.feature_ids]
    if missing:
        raise CensembleError(f"unknown feature ids: {', '.join(missing)}")
    return ids


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


# -- subcommands ---------------------------------------------------------------

def cmd_extract(args):
    cfg = load_config(args.config)
    manifest = read_manifest(args.manifest)
    existing = read_matrix(args.append) if args.append else None
    cache = args.cache_dir if args.cache_dir is not None else os.environ.get(CACHE_ENV)
    done = {"n": 0}

    def progress(i, n):
        if args.verbose and (i == n or i % 50 == 0):
            print(f"  {i}/{n}", file=sys.stderr)
        done["n"] = i

    res = compute_corpus(manifest, cfg, args.workers, cache or None, args.dump_streams, progress, existing)
    write_matrix(res.matrix, args.out, args.format)
    if args.errors:
        _write_table(args.errors, ["id", "path", "error", "reason"],
                     [(e.id, e.path, e.error, e.reason) for e in res.errors])
    print(f"images: {len(manifest)}  ok: {len(manifest) - len(res.errors)}  failed: {len(res.errors)}")
    print(f"features: {len(res.matrix.feature_ids)}  config: {res.matrix.config_hash[:12]}")
    print(f"computed: {res.computed}  cache hits: {res.cache_hits}")
    print(f"rows written: {res.matrix.n_rows} -> {args.out}")
    for e in res.errors:
        print(f"failed {e.id}: {e.error}: {e.reason}", file=sys.stderr)
    return EXIT_OK


def cmd_zscore(args):
    m = read_matrix(args.input)
    z = zscore_matrix(m, args.group_by)
    write_matrix(z, args.out, args.format)
    print(f"rows: {z.n_rows}  features: {len(z.feature_ids)}  zero-variance: {len(z.flags['zero_variance'])}")
    return EXIT_OK


def cmd_pca(args):
    m = read_matrix(args.input)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = analysis.pca_fit(m, args.k)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    coords = analysis.pca_project(model, m)
    k = model.n_components
    _write_table(args.out, ["id"] + [f"pc{i + 1}" for i in range(k)],
                 [[rid] + [_num(float(v)) for v in row] for rid, row in zip(m.ids, coords)])
    if args.loadings:
        _write_table(args.loadings, ["feature"] + [f"pc{i + 1}" for i in range(k)],
                     [[f] + [_num(float(v)) for v in model.components[:, j]] for j, f in enumerate(m.feature_ids)])
    ratios = ", ".join(f"pc{i + 1}={r:.4f}" for i, r in enumerate(model.explained_ratio))
    print(f"explained variance ratio: {ratios}", file=sys.stderr)
    return EXIT_OK


def _knn_rows(m, query, k, exclude):
    return [(rid, _num(sim)) for rid, sim in analysis.cosine_knn(m, query, k, exclude)]


def cmd_knn(args):
    m = read_matrix(args.input)
    exclude = analysis.same_artist_as(m, args.query, args.artist_key) if args.exclude_artist else None
    if args.exclude_self and exclude is None:
        qid = args.query
        exclude = lambda r: str(r.get("id")) == qid  # noqa: E731
    _write_table(args.out, ["id", "similarity"], _knn_rows(m, args.query, args.k, exclude))
    return EXIT_OK


def cmd_arith(args):
    m = read_matrix(args.input)
    vec = analysis.vector_arith(m, args.expr)
    if args.vector_out:
        _write_table(args.vector_out, ["feature", "value"],
                     [(f, _num(float(v))) for f, v in zip(m.feature_ids, vec)])
    drop = set(args.exclude or [])
    exclude = (lambda r: str(r.get("id")) in drop) if drop else None
    _write_table(args.out, ["id", "similarity"], _knn_rows(m, vec, args.k, exclude))
    return EXIT_OK


def cmd_classify(args):
    m = read_matrix(args.input)
    res = analysis.classify(m, args.label, args.train_n, args.test_n, args.replicates, args.seed,
                            _features(m, args.features), args.workers)
    print(f"label: {args.label}  classes: {len(res.classes)}  replicates: {len(res.accuracies)}")
    print(f"mean accuracy: {res.mean_accuracy:.4f}  sd: {res.accuracies.std():.4f}  "
          f"chance: {1 / len(res.classes):.4f}")
    if args.confusion:
        rates = res.confusion_rates()
        _write_table(args.confusion, ["true"] + list(res.classes),
                     [[c] + [_num(float(v)) for v in rates[i]] for i, c in enumerate(res.classes)])
    return EXIT_OK


def cmd_importance(args):
    m = read_matrix(args.input)
    imp = analysis.feature_importance(m, args.label, args.seed, args.max_per_class)
    _write_table(args.out, ["rank", "feature", "mean_abs_t"],
                 [(i + 1, f, _num(imp.mean_abs_t[f])) for i, f in enumerate(imp.order)])
    return EXIT_OK


def cmd_stepwise(args):
    m = read_matrix(args.input)
    order = None
    if args.order:
        with open(args.order, newline="") as fh:
            order = [row["feature"] for row in csv.DictReader(fh)]
    rows = analysis.stepwise_accuracy(m, args.label, _ints(args.train_sizes), args.seed, args.test_n,
                                      args.replicates, order, _ints(args.counts) if args.counts else None,
                                      args.workers)
    _write_table(args.out, ["train_n", "n_features", "last_feature", "mean_accuracy", "sd_accuracy", "replicates"],
                 [(r.train_n, r.n_features, r.last_feature, _num(r.mean_accuracy), _num(r.sd_accuracy),
                   r.replicates) for r in rows])
    return EXIT_OK


def read_norms(path, id_column, score_column):
    """Mean ratings keyed by picture id from a CSV/TSV norms table."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        dialect = csv.Sniffer().sniff(sample, delimiters=",;\t") if sample else csv.excel
        reader = csv.DictReader(fh, dialect=dialect)
        cols = reader.fieldnames or []
        for col in (id_column, score_column):
            if col not in cols:
                raise CensembleError(f"{path}: no column {col!r} (have {', '.join(cols)})")
        out = {}
        for row in reader:
            val = (row[score_column] or "").strip().replace(",", ".")
            if val:
                out[os.path.splitext(row[id_column].strip())[0]] = float(val)
    return out


def cmd_norms(args):
    m = read_matrix(args.input)
    norms = read_norms(args.norms, args.id_column, args.score_column)
    rows = [i for i, rid in enumerate(m.ids) if os.path.splitext(rid)[0] in norms]
    if len(rows) < 3:
        raise CensembleError(f"only {len(rows)} matrix rows have a rating in {args.norms}")
    sub = m.subset(rows)
    y = np.array([norms[os.path.splitext(rid)[0]] for rid in sub.ids])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = analysis.linreg_fit_eval(sub, y, args.folds, args.seed, _features(m, args.features))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _write_table(args.out, ["metric", "value"], [
        ("n", rep.n), ("features", rep.n_features), ("r2", _num(rep.r2)),
        ("adjusted_r2", _num(rep.adjusted_r2)), ("median_abs_error", _num(rep.median_abs_error)),
        ("folds", rep.folds), ("pca_reduced_to", "" if rep.reduced_to is None else rep.reduced_to),
    ])
    return EXIT_OK


def cmd_temporal(args):
    m = read_matrix(args.input)
    fit_range = tuple(args.fit_range) if args.fit_range else None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        prof = analysis.temporal_resemblance(m, args.k, args.year_key, args.artist_key, fit_range)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _write_table(args.out, ["id", "year", "raw", "adjusted", "neighbors"],
                 [(rid, _num(float(y)), _num(float(r)), _num(float(a)), int(n))
                  for rid, y, r, a, n in zip(prof.ids, prof.years, prof.raw, prof.adjusted, prof.n_neighbors)])
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(plots.temporal_svg(prof.years, prof.adjusted))
    return EXIT_OK


def cmd_trend(args):
    m = read_matrix(args.input)
    if args.value.lower().startswith("pc") and args.value[2:].isdigit():
        k = int(args.value[2:])
        model = analysis.pca_fit(m, k)
        if model.n_components < k:
            raise CensembleError(f"data has only {model.n_components} principal components")
        values = analysis.pca_project(model, m)[:, k - 1]
    elif args.value in m.feature_ids:
        values = m.column(args.value)
    else:
        raise CensembleError(f"--value {args.value!r} is neither pcN nor a feature id")
    rows = analysis.rolling_trend(m, values, args.time_key, args.half_window, args.max_window, args.min_n)
    qs = analysis.QUANTILES
    _write_table(args.out, ["time", "n", "half_window", "stretched"] + [f"q{q:g}" for q in qs],
                 [[_num(r.time), r.n, _num(r.half_window), int(r.stretched)] + [_num(v) for v in r.quantiles]
                  for r in rows])
    if args.svg:
        times = m.meta_column(args.time_key)
        pts = [(float(t), float(v)) for t, v in zip(times, values) if t not in (None, "")]
        with open(args.svg, "w") as fh:
            fh.write(plots.trend_svg(pts, rows, args.time_key, args.value))
    return EXIT_OK


def _drift(items):
    out = {}
    for item in items or []:
        try:
            fam, param, base, slope = item.split(":")
            out.setdefault(fam, {})[param] = (float(base), float(slope))
        except ValueError:
            raise UsageError(f"--drift expects family:param:base:slope, got {item!r}") from None
    return out


def cmd_synth(args):
    from .synth import FAMILIES, SynthFamilySpec, generate_synthetic_corpus
    fams = args.families.split(",") if args.families else list(FAMILIES)
    drift = _drift(args.drift)
    try:
        specs = [SynthFamilySpec(f, drift=drift.get(f, {}), seed=args.seed) for f in fams]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    path = generate_synthetic_corpus(specs, args.n, args.out, tuple(args.years), args.seed,
                                     args.size, args.size, args.artists)
    print(f"wrote {len(specs) * args.n} images, manifest {path}")
    return EXIT_OK


def cmd_list_transforms(args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "dims", "seeded", "params", "description"])
    for tid in transforms.transform_ids():
        e = transforms.get(tid)
        params = ";".join(f"{k}={v}" for k, v in sorted(e.defaults.items()))
        w.writerow([tid, e.dims, int(e.seeded), params, e.description])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _matrix_io(p, out=True):
    p.add_argument("--in", dest="input", required=True, help="matrix file (.bin or .csv)")
    if out:
        p.add_argument("--out", default=None, help="output CSV (default: stdout)")


def build_parser():
    ap = _Parser(prog="censemble", description="Compression-ensemble vectors for image corpora.")
    ap.add_argument("--list-transforms", action="store_true", help="list registered transforms and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, metavar="command")

    p = sub.add_parser("extract", help="compute the ensemble matrix of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", default=None, help="INI config (default: packaged default.cfg)")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("bin", "csv"), default=None, help="default: from the extension")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", default=None, help=f"feature cache (default: ${CACHE_ENV})")
    p.add_argument("--dump-streams", default=None, metavar="DIR", help="write every encoded stream to DIR")
    p.add_argument("--append", default=None, metavar="MATRIX", help="append to an existing matrix")
    p.add_argument("--errors", default=None, help="CSV report of failed images")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("zscore", help="standardize matrix columns")
    _matrix_io(p, out=False)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("bin", "csv"), default=None)
    p.add_argument("--group-by", default=None, help="metadata key to z-score within (e.g. an era column)")
    p.set_defaults(func=cmd_zscore)

    p = sub.add_parser("pca", help="principal component coordinates")
    _matrix_io(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--loadings", default=None, help="write component loadings CSV")
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("knn", help="cosine nearest neighbours of a row")
    _matrix_io(p)
    p.add_argument("--query", required=True, help="row id")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--exclude-artist", action="store_true", help="drop the query's artist (and the query)")
    p.add_argument("--exclude-self", action="store_true")
    p.add_argument("--artist-key", default="artist")
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("arith", help="neighbours of a vector expression")
    _matrix_io(p)
    p.add_argument("--expr", required=True, help="e.g. 'id4 + id6' or 'id1 * mean(genre=landscape)'")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--exclude", nargs="*", help="row ids to leave out of the ranking")
    p.add_argument("--vector-out", default=None, help="write the resulting vector as CSV")
    p.set_defaults(func=cmd_arith)

    p = sub.add_parser("classify", help="repeated LDA train/test evaluation")
    _matrix_io(p, out=False)
    p.add_argument("--label", required=True)
    p.add_argument("--train-n", type=int, default=100)
    p.add_argument("--test-n", type=int, default=20)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--features", default="all", help="all, baseline or comma-separated ids")
    p.add_argument("--confusion", default=None, help="write row-normalized confusion CSV")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("importance", help="feature order by mean pairwise logistic |t|")
    _matrix_io(p)
    p.add_argument("--label", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-per-class", type=int, default=None)
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("stepwise", help="accuracy by training size and feature count")
    _matrix_io(p)
    p.add_argument("--label", required=True)
    p.add_argument("--train-sizes", default="10,100")
    p.add_argument("--test-n", type=int, default=20)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--counts", default=None, help="comma-separated prefix lengths (default: all)")
    p.add_argument("--order", default=None, help="importance CSV to take the order from")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_stepwise)

    p = sub.add_parser("norms", help="regress human ratings on ensemble vectors")
    _matrix_io(p)
    p.add_argument("--norms", required=True, help="CSV/TSV with picture ids and mean ratings")
    p.add_argument("--id-column", default="id")
    p.add_argument("--score-column", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--features", default="all")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("temporal", help="temporal resemblance per row")
    _matrix_io(p)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--year-key", default="year")
    p.add_argument("--artist-key", default="artist")
    p.add_argument("--fit-range", type=float, nargs=2, metavar=("FIRST", "LAST"), default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_temporal)

    p = sub.add_parser("trend", help="rolling quantile trend of a feature or principal component")
    _matrix_io(p)
    p.add_argument("--value", default="pc1", help="pcN or a feature id")
    p.add_argument("--time-key", default="year")
    p.add_argument("--half-window", type=float, default=10)
    p.add_argument("--max-window", type=float, default=50)
    p.add_argument("--min-n", type=int, default=1000)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("synth", help="write a synthetic labeled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=100, help="images per family")
    p.add_argument("--families", default=None, help="comma-separated (default: all five)")
    p.add_argument("--years", type=int, nargs=2, default=(1800, 1990))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=400)
    p.add_argument("--artists", type=int, default=10, help="synthetic artists per family")
    p.add_argument("--drift", action="append", metavar="FAMILY:PARAM:BASE:SLOPE")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("list-transforms", help="list registered transforms")
    p.set_defaults(func=cmd_list_transforms)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.list_transforms:
            return cmd_list_transforms(args)
        if not args.command:
            ap.print_usage(sys.stderr)
            raise UsageError("censemble: error: a command is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (CensembleError, OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"censemble: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
