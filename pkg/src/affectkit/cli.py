"""Command-line entry point: ``affectkit <command> [options]``.

Each command reads its inputs, writes its artifacts and prints one summary
line.  Options not given on the command line fall back to the matching
section of the ``--config`` JSON file, then to built-in defaults.  On any
failure the process exits with status 1 and prints ``error: <category>:
<message>`` on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataio, evaluation, evec, features, multilabel, ordmap, regress, textprep
from .errors import AffectError, FormatError, MissingIdError


def _config(args) -> dict:
    if not getattr(args, "config", None):
        return {}
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise FormatError("config must be a JSON object", args.config)
    return cfg


def _opt(args, cfg: dict, section: str, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    sec = cfg.get(section, {})
    if name in sec:
        return sec[name]
    if name in cfg.get("paths", {}):
        return cfg["paths"][name]
    return default


def _seed(args, cfg) -> int:
    return int(args.seed if args.seed is not None else cfg.get("seed", 0))


def _read_dataset(path, kind=None):
    """Load any labeled dataset; ``kind`` is guessed from the header when unset."""
    if kind is None:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().rstrip("\r\n").split("\t")
        if len(header) == 4 and header[3].strip().lower() == "intensity class":
            kind = "oc"
        elif len(header) == 4 and header[2].strip().lower() == "affect dimension":
            kind = "reg"
        else:
            kind = "ml"
    if kind == "ml":
        names, inst = dataio.read_multilabel_dataset(path)
        return kind, names, inst
    return kind, None, dataio.read_intensity_dataset(path, kind)


def _load_features(path) -> dataio.SentenceFeatureMatrix:
    return dataio.read_sentence_features(path)


def _align(matrix: dataio.SentenceFeatureMatrix, ids) -> np.ndarray:
    missing = [i for i in ids if i not in matrix]
    if missing:
        raise MissingIdError(f"{len(missing)} id(s) missing from features, first: {missing[0]!r}")
    return matrix.matrix[[matrix.index[i] for i in ids]].reshape(len(ids), matrix.dim)


def _lexicons(args, cfg):
    return dataio.load_lexicons(
        _opt(args, cfg, "features", "emoji_lexicon"),
        _opt(args, cfg, "features", "emoticons"),
        _opt(args, cfg, "features", "word_freq"),
    )


def _write_json(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# commands

def cmd_prep(args, cfg):
    kind, _, inst = _read_dataset(args.dataset, args.kind)
    vocab = None
    vectors_path = _opt(args, cfg, "features", "vectors")
    if vectors_path:
        vocab = dataio.read_word_vectors(vectors_path).index
    freq_path = _opt(args, cfg, "features", "word_freq")
    freq = textprep.WordFreq(dataio.read_word_freq(freq_path)) if freq_path else None
    textprep.tokenize_instances(inst, vocab if vocab is not None else set(), freq)
    dataio.write_tokens(inst, args.out)
    n_tok = sum(len(i.tokens) for i in inst)
    return f"prep: {len(inst)} instances, {n_tok} tokens -> {args.out}"


def _corpus(path):
    return [(textprep.normalize_tokenize(text), label) for label, text in dataio.read_hashtag_corpus(path)]


def cmd_evec_train(args, cfg):
    params = dict(cfg.get("evec", {}))
    for key in ("emb_dim", "epochs", "lr", "batch", "patience"):
        if getattr(args, key, None) is not None:
            params[key] = getattr(args, key)
    params["seed"] = _seed(args, cfg)
    config = evec.EvecConfig.from_dict(params)
    train = _corpus(args.corpus)
    dev = _corpus(args.dev) if args.dev else []
    log = evec.TrainLog()
    model = evec.train_evec(train, dev, config, log)
    dataio.persist_model(model, args.out)
    if args.freq_out:
        counts = {}
        for toks, _ in train:
            for t in toks:
                counts[t] = counts.get(t, 0) + 1
        dataio.write_word_freq(dict(sorted(counts.items())), args.freq_out)
    extra = ""
    if dev:
        enc = [(model.encode(t), y) for t, y in dev]
        extra = f" dev_loss={evec.mean_loss(model, enc):.4f} dev_acc={evec.accuracy(model, enc):.4f}"
    return (f"evec-train: vocab={len(model.vocab)} dim={model.emb_dim} "
            f"best_epoch={log.best_epoch}{extra} -> {args.out}")


def cmd_evec_export(args, cfg):
    model = dataio.load_model(args.model)
    if not isinstance(model, evec.EvecModel):
        raise FormatError("not an evec model", args.model)
    table = evec.export_vectors(model)
    dataio.write_word_vectors(table, args.out)
    return f"evec-export: {len(table)} vectors dim={table.dim} -> {args.out}"


def cmd_featurize(args, cfg):
    _, _, inst = _read_dataset(args.dataset, args.kind)
    fcfg = cfg.get("features", {})
    sentence_path = _opt(args, cfg, "features", "sentence_file")
    vectors_path = _opt(args, cfg, "features", "vectors")
    use_tweet = args.tweet_features if args.tweet_features is not None else fcfg.get("tweet", False)
    lex = _lexicons(args, cfg)
    sentence = _load_features(sentence_path) if sentence_path else None
    vectors = dataio.read_word_vectors(vectors_path) if vectors_path else None
    if lex.word_freq and vectors is not None:
        textprep.tokenize_instances(inst, vectors.index, textprep.WordFreq(lex.word_freq))
    assembled = features.assemble(inst, sentence, vectors, bool(use_tweet), lex)
    if assembled.width == 0:
        raise FormatError("no feature blocks selected")
    if args.fit_scaler:
        scaler = features.fit_scaler(assembled)
        dataio.persist_model(scaler, args.fit_scaler)
        assembled = features.apply_scaler(scaler, assembled)
    elif args.scaler:
        scaler = dataio.load_model(args.scaler)
        assembled = features.apply_scaler(scaler, assembled)
    dataio.write_sentence_features(assembled.to_matrix(), args.out)
    _write_json({k: list(v) for k, v in assembled.block_layout.items()}, f"{args.out}.layout.json")
    blocks = ",".join(f"{k}[{b - a}]" for k, (a, b) in assembled.block_layout.items())
    return f"featurize: {len(inst)} rows width={assembled.width} blocks={blocks} -> {args.out}"


def _reg_xy(features_path, dataset_path):
    _, _, inst = _read_dataset(dataset_path, "reg")
    ids = [i.id for i in inst]
    X = _align(_load_features(features_path), ids)
    y = np.array([i.reg_label for i in inst])
    return ids, X, y


def cmd_reg_train(args, cfg):
    _, Xtr, ytr = _reg_xy(args.train_features, args.train_data)
    _, Xdev, ydev = _reg_xy(args.dev_features, args.dev_data)
    rcfg = cfg.get("regression", {})
    if args.grid:
        grid = regress.read_grid(args.grid)
    elif "grid" in rcfg:
        grid = [regress.RegressionConfig.from_dict(d) for d in rcfg["grid"]]
    else:
        grid = regress.default_grid(Xtr.shape[1])
    merge = rcfg.get("merge_train_dev", True) if args.merge is None else args.merge
    result = regress.grid_search((Xtr, ytr), (Xdev, ydev), grid, merge_train_dev=merge)
    dataio.persist_model(result.model, args.out)
    if args.report:
        _write_json(result.to_dict(), args.report)
    return (f"reg-train: best={result.best_config.label()} dev_pearson={result.best_score:.4f} "
            f"configs={len(grid)} merged={bool(merge)} -> {args.out}")


def cmd_reg_predict(args, cfg):
    model = dataio.load_model(args.model)
    if not isinstance(model, regress.KernelModel):
        raise FormatError("not a regression model", args.model)
    feats = _load_features(args.features)
    pred = regress.predict(model, feats.matrix)
    if args.clip:
        pred = np.clip(pred, 0.0, 1.0)
    dataio.write_predictions(feats.ids, pred, args.out)
    return f"reg-predict: {len(pred)} predictions -> {args.out}"


def _prediction_vectors(paths):
    preds = [dataio.read_predictions(p) for p in paths]
    ids = list(preds[0])
    for p, path in zip(preds[1:], paths[1:]):
        if list(p) != ids:
            raise FormatError("prediction files must list the same ids in the same order", path)
    return ids, {str(path): np.array([p[i] for i in ids]) for p, path in zip(preds, paths)}


def cmd_reg_ensemble(args, cfg):
    ids, vecs = _prediction_vectors(args.predictions)
    names = list(vecs)
    if args.select_on:
        _, _, gold = _read_dataset(args.select_on, "reg")
        gmap = {i.id: i.reg_label for i in gold}
        missing = [i for i in ids if i not in gmap]
        if missing:
            raise MissingIdError(f"no gold label for id {missing[0]!r}")
        names = regress.greedy_ensemble_select(vecs, np.array([gmap[i] for i in ids]))
        if args.selection_out:
            _write_json({"selected": names}, args.selection_out)
    avg = regress.ensemble_average([vecs[n] for n in names])
    dataio.write_predictions(ids, avg, args.out)
    return f"reg-ensemble: {len(names)}/{len(vecs)} members averaged -> {args.out}"


def _pairs(reg_path, oc_path):
    _, _, reg = _read_dataset(reg_path, "reg")
    _, _, oc = _read_dataset(oc_path, "oc")
    ords = {i.id: i.ord_label for i in oc}
    missing = [i.id for i in reg if i.id not in ords]
    if missing:
        raise MissingIdError(f"id {missing[0]!r} has a regression label but no ordinal label")
    emotion = reg[0].emotion if reg else None
    return [(i.reg_label, ords[i.id]) for i in reg], emotion


def cmd_ordmap_fit(args, cfg):
    pairs, emotion = _pairs(args.train_reg, args.train_oc)
    ordinals = list(dataio.ORDINALS.get(emotion, sorted({o for _, o in pairs})))
    method = _opt(args, cfg, "ordmap", "method", "auto")
    if method != "auto":
        mapper = ordmap.fit_mapper(method, pairs, ordinals)
        dataio.persist_model(mapper, args.out)
        return f"ordmap-fit: method={method} -> {args.out}"
    if not args.dev_predictions or not args.dev_oc:
        raise FormatError("auto mapping needs --dev-predictions and --dev-oc")
    _, _, dev_oc = _read_dataset(args.dev_oc, "oc")
    gold = {i.id: i.ord_label for i in dev_oc}
    ids, vecs = _prediction_vectors(args.dev_predictions)
    missing = [i for i in ids if i not in gold]
    if missing:
        raise MissingIdError(f"no dev ordinal label for id {missing[0]!r}")
    dev_ords = np.array([gold[i] for i in ids])
    if args.submission_strategy:
        name, mapper, scores = ordmap.select_joint(pairs, vecs, dev_ords, ordinals)
        detail = " ".join(f"{Path(n).name}/{m}={s:.4f}" for (n, m), s in scores.items())
        chosen = f"predictions={Path(name).name} method={mapper.variant}"
    else:
        first = next(iter(vecs))
        mapper, scores = ordmap.select_mapper(pairs, vecs[first], dev_ords, ordinals)
        detail = " ".join(f"{m}={s:.4f}" for m, s in scores.items())
        chosen = f"method={mapper.variant}"
    dataio.persist_model(mapper, args.out)
    if args.report:
        _write_json({"chosen": mapper.variant,
                     "scores": {("/".join(map(str, k)) if isinstance(k, tuple) else k): v
                                for k, v in scores.items()}}, args.report)
    return f"ordmap-fit: {chosen} dev_pearson {detail} -> {args.out}"


def cmd_ordmap_apply(args, cfg):
    mapper = dataio.load_model(args.mapper)
    if not isinstance(mapper, ordmap.OrdinalMapper):
        raise FormatError("not an ordinal mapper", args.mapper)
    preds = dataio.read_predictions(args.predictions)
    ords = mapper.apply(np.array(list(preds.values())))
    dataio.write_predictions(list(preds), [int(o) for o in ords], args.out)
    return f"ordmap-apply: {len(ords)} ordinals ({mapper.variant}) -> {args.out}"


def _ml_xy(features_path, dataset_path):
    _, names, inst = _read_dataset(dataset_path, "ml")
    ids = [i.id for i in inst]
    X = _align(_load_features(features_path), ids)
    return names, inst, X, dataio.labels_matrix(inst)


def _with_bias(X):
    return np.hstack([X, np.ones((X.shape[0], 1))])


def cmd_ml_train_rlr(args, cfg):
    names, _, X, Y = _ml_xy(args.features, args.dataset)
    mcfg = cfg.get("multilabel", {})
    lam = args.lam if args.lam is not None else mcfg.get("lam", multilabel.DEFAULT_LAMBDA)
    lr = args.lr if args.lr is not None else mcfg.get("lr", multilabel.DEFAULT_LR)
    iters = args.iters if args.iters is not None else mcfg.get("iters", 1000)
    graph = multilabel.laplacian(multilabel.cooccurrence(Y))
    bounded = multilabel.is_bounded(graph.L, lam)
    model = multilabel.train_rlr(_with_bias(X), Y, graph.L, lam, lr, iters, _seed(args, cfg),
                                 label_names=names)
    tune = mcfg.get("tune_thresholds", False) if args.tune is None else args.tune
    if tune:
        if not (args.dev_features and args.dev_dataset):
            raise FormatError("threshold tuning needs --dev-features and --dev-dataset")
        _, _, Xd, Yd = _ml_xy(args.dev_features, args.dev_dataset)
        model.thresholds = multilabel.tune_thresholds(model.scores(_with_bias(Xd)), Yd)
    dataio.persist_model(model, args.out)
    loss = multilabel.rlr_loss(model.W, _with_bias(X), Y, graph.L, lam)
    note = "" if bounded else " (unbounded objective)"
    return (f"ml-train-rlr: C={Y.shape[1]} N={X.shape[1]} iters={model.n_iter} "
            f"loss={loss:.6g}{note} -> {args.out}")


def cmd_ml_train_cc(args, cfg):
    names, _, X, Y = _ml_xy(args.features, args.dataset)
    mcfg = cfg.get("multilabel", {})
    n_chains = args.chains if args.chains is not None else mcfg.get("chains", 10)
    l2 = args.l2 if args.l2 is not None else mcfg.get("l2", 1e-3)
    lr = args.lr if args.lr is not None else mcfg.get("cc_lr", 0.5)
    iters = args.iters if args.iters is not None else mcfg.get("cc_iters", 2000)
    ens = multilabel.train_chain_ensemble(X, Y, n_chains, _seed(args, cfg), l2, lr, iters,
                                          label_names=names)
    dataio.persist_model(ens, args.out)
    train_j = evaluation.jaccard_multilabel(Y, ens.predict(X))
    return f"ml-train-cc: chains={n_chains} C={Y.shape[1]} train_jaccard={train_j:.4f} -> {args.out}"


def cmd_ml_predict(args, cfg):
    names, inst, X, _ = _ml_xy(args.features, args.dataset)
    if not (args.rlr or args.cc):
        raise FormatError("ml-predict needs --rlr and/or --cc")
    rlr = dataio.load_model(args.rlr) if args.rlr else None
    cc = dataio.load_model(args.cc) if args.cc else None
    weights = args.weights or cfg.get("multilabel", {}).get("weights", [0.5, 0.5])
    if rlr is not None and cc is not None:
        scores = rlr.scores(_with_bias(X))
        probs, _ = multilabel.predict_chain_ensemble(cc, X, cc.threshold)
        thresholds = (float(weights[0]) * rlr.thresholds + float(weights[1]) * cc.threshold) \
            / (float(weights[0]) + float(weights[1]))
        labels = multilabel.ensemble_multilabel(scores, probs, weights, thresholds)
        which = "ensemble"
    elif rlr is not None:
        labels = multilabel.predict_rlr(rlr, _with_bias(X))[1]
        which = "rlr"
    else:
        labels = multilabel.predict_chain_ensemble(cc, X, cc.threshold)[1]
        which = "cc"
    out = [dataio.LabeledInstance(i.id, i.raw_text, multilabels=tuple(row))
           for i, row in zip(inst, labels)]
    dataio.write_multilabel_dataset(names, out, args.out)
    return f"ml-predict: {len(out)} rows ({which}) -> {args.out}"


def cmd_eval(args, cfg):
    kind = args.task
    if kind == "ml":
        names, gold = dataio.read_multilabel_dataset(args.gold)
        pnames, pred = dataio.read_multilabel_dataset(args.predictions)
        if names != pnames:
            raise FormatError("label columns differ between gold and predictions", args.predictions)
        pmap = {i.id: i.multilabels for i in pred}
        missing = [i.id for i in gold if i.id not in pmap]
        if missing:
            raise MissingIdError(f"no prediction for id {missing[0]!r}")
        report = evaluation.multilabel_report(dataio.labels_matrix(gold),
                                              np.array([pmap[i.id] for i in gold]))
    else:
        _, _, gold = _read_dataset(args.gold, kind)
        field = "reg_label" if kind == "reg" else "ord_label"
        gmap = {i.id: (i.emotion, float(getattr(i, field))) for i in gold}
        report = evaluation.regression_report(gmap, dataio.read_predictions(args.predictions))
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_json())
    return f"eval[{kind}]: {report.to_text()}"


def cmd_bias_audit(args, cfg):
    preds = dataio.read_predictions(args.predictions)
    pairs = evaluation.read_bias_pairs(args.pairs)
    audit = evaluation.bias_audit(preds, pairs)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(evaluation.bias_report_json(audit))
    body = " ".join(f"{a}/{e}={v['percent']:+.2f}%" for (a, e), v in audit.items())
    return f"bias-audit: {len(pairs)} pairs {body}"


# ---------------------------------------------------------------------------
# parser

def _bool_flag(p, name, dest, help_on):
    g = p.add_mutually_exclusive_group()
    g.add_argument(f"--{name}", dest=dest, action="store_true", default=None, help=help_on)
    g.add_argument(f"--no-{name}", dest=dest, action="store_false", default=None)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline config")
    common.add_argument("--seed", type=int, help="random seed (overrides config)")

    parser = argparse.ArgumentParser(prog="affectkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("prep", cmd_prep, "tokenize a dataset (segmenting unknown words)")
    p.add_argument("dataset")
    p.add_argument("out")
    p.add_argument("--kind", choices=["reg", "oc", "ml"])
    p.add_argument("--vectors", help="word-vector file whose tokens form the vocabulary")
    p.add_argument("--word-freq", dest="word_freq", help="token<TAB>count file for segmentation")

    p = add("evec-train", cmd_evec_train, "train emotional word vectors on a hashtag corpus")
    p.add_argument("corpus")
    p.add_argument("out")
    p.add_argument("--dev")
    p.add_argument("--freq-out", dest="freq_out", help="also write corpus token counts here")
    p.add_argument("--emb-dim", dest="emb_dim", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch", type=int)
    p.add_argument("--patience", type=int)

    p = add("evec-export", cmd_evec_export, "export the embedding layer as word vectors")
    p.add_argument("model")
    p.add_argument("out")

    p = add("featurize", cmd_featurize, "assemble feature vectors for a dataset")
    p.add_argument("dataset")
    p.add_argument("out")
    p.add_argument("--kind", choices=["reg", "oc", "ml"])
    p.add_argument("--sentence", dest="sentence_file", help="sentence-representation TSV")
    p.add_argument("--vectors", help="word-vector file for the averaged block")
    _bool_flag(p, "tweet-features", "tweet_features", "add the 6 tweet-specific counts")
    p.add_argument("--emoji-lexicon", dest="emoji_lexicon")
    p.add_argument("--emoticons")
    p.add_argument("--word-freq", dest="word_freq")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--fit-scaler", dest="fit_scaler", help="fit a z-score scaler here and apply it")
    g.add_argument("--scaler", help="apply a previously fitted scaler")

    p = add("reg-train", cmd_reg_train, "grid-search and train an intensity regressor")
    for a in ("train_features", "train_data", "dev_features", "dev_data", "out"):
        p.add_argument(a)
    p.add_argument("--grid", help="JSON list of {method, kernel, hyperparameters}")
    p.add_argument("--report", help="write per-config dev scores here")
    _bool_flag(p, "merge", "merge", "refit the winner on train+dev")

    p = add("reg-predict", cmd_reg_predict, "predict intensities")
    p.add_argument("model")
    p.add_argument("features")
    p.add_argument("out")
    p.add_argument("--clip", action="store_true", help="clip predictions to [0,1]")

    p = add("reg-ensemble", cmd_reg_ensemble, "average prediction files")
    p.add_argument("out")
    p.add_argument("predictions", nargs="+")
    p.add_argument("--select-on", dest="select_on", help="gold file for greedy member selection")
    p.add_argument("--selection-out", dest="selection_out")

    p = add("ordmap-fit", cmd_ordmap_fit, "fit a regression-to-ordinal mapping")
    p.add_argument("train_reg")
    p.add_argument("train_oc")
    p.add_argument("out")
    p.add_argument("--method", choices=["auto", *ordmap.METHODS])
    p.add_argument("--dev-predictions", dest="dev_predictions", nargs="+")
    p.add_argument("--dev-oc", dest="dev_oc")
    p.add_argument("--submission-strategy", dest="submission_strategy", action="store_true",
                   help="search prediction set and mapping jointly on dev")
    p.add_argument("--report")

    p = add("ordmap-apply", cmd_ordmap_apply, "map predictions to ordinal classes")
    p.add_argument("mapper")
    p.add_argument("predictions")
    p.add_argument("out")

    p = add("ml-train-rlr", cmd_ml_train_rlr, "train the Laplacian-regularized linear model")
    p.add_argument("features")
    p.add_argument("dataset")
    p.add_argument("out")
    p.add_argument("--lam", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--iters", type=int)
    _bool_flag(p, "tune", "tune", "tune per-label thresholds on the dev set")
    p.add_argument("--dev-features", dest="dev_features")
    p.add_argument("--dev-dataset", dest="dev_dataset")

    p = add("ml-train-cc", cmd_ml_train_cc, "train a classifier-chain ensemble")
    p.add_argument("features")
    p.add_argument("dataset")
    p.add_argument("out")
    p.add_argument("--chains", type=int)
    p.add_argument("--l2", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--iters", type=int)

    p = add("ml-predict", cmd_ml_predict, "predict label sets")
    p.add_argument("features")
    p.add_argument("dataset")
    p.add_argument("out")
    p.add_argument("--rlr")
    p.add_argument("--cc")
    p.add_argument("--weights", type=float, nargs=2)

    p = add("eval", cmd_eval, "score predictions against gold labels")
    p.add_argument("gold")
    p.add_argument("predictions")
    p.add_argument("--task", choices=["reg", "oc", "ml"], default="reg")
    p.add_argument("--report", help="write the EvalReport JSON here")

    p = add("bias-audit", cmd_bias_audit, "mean score differences over paired sentences")
    p.add_argument("predictions")
    p.add_argument("pairs")
    p.add_argument("--report")
    return parser


def _category(exc) -> str:
    if isinstance(exc, AffectError):
        return exc.category
    if isinstance(exc, (FileNotFoundError, IsADirectoryError, PermissionError)):
        return "io"
    if isinstance(exc, json.JSONDecodeError):
        return "config"
    return "invalid"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        line = args.func(args, cfg)
    except (AffectError, OSError, ValueError, KeyError, IndexError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"error: {_category(exc)}: {msg}", file=sys.stderr)
        return 1
    print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
