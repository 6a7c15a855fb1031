"""Command-line front end: ``gradedk <command> [options]``.

Exit codes: 0 success, 2 input error, 3 inconclusive result under ``--strict``.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Sequence

from .abelian import SubgroupPresentation, parse_element, parse_group
from .dimension import (
    DimensionTriple,
    DmElement,
    PositivityKind,
    SseChain,
    SseStep,
    dm_add,
    dm_equal,
    dm_positive,
    dm_shift,
    dm_unshift,
    order_unit,
    se_refute,
    sse_search,
    verify_ese_step,
    verify_se_witness,
)
from .graph import (
    GraphFormatError,
    SplitPartition,
    adjacency,
    classify,
    format_graph,
    in_split,
    out_split,
    parse_graph,
)
from .linalg import IntMatrix, MatrixFormatError, parse_matrix
from .lpa import (
    SCHEMA,
    HypothesisError,
    k0_lpa,
    k0gr_graded_field,
    k0gr_graded_local,
    k0gr_lpa,
    k0gr_path_algebra,
    lpa_structure,
    picgr_graded_field,
)
from .shifts import (
    AlgebraFormatError,
    component_dim,
    format_algebra,
    grading_report,
    graded_iso,
    has_invertible_of_degree,
    parse_algebra,
    support_cosets,
    zero_component_blocks,
)

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN = 0, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse's exit code 2 but route through stderr cleanly
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str):
    try:
        return parse_graph(_read(path))
    except GraphFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_matrix(spec: str) -> IntMatrix:
    """A matrix file, or an inline literal with rows separated by ``;``."""
    if os.path.exists(spec):
        text, where = _read(spec), spec
    else:
        if not any(ch.isdigit() for ch in spec):
            raise InputError(f"cannot read {spec}: no such file")
        text, where = spec.replace(";", "\n"), "inline matrix"
    try:
        return parse_matrix(text)
    except MatrixFormatError as exc:
        raise InputError(f"{where}: {exc}") from None


def _algebra(text: str):
    try:
        return parse_algebra(text)
    except (AlgebraFormatError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _element(text: str, n: int) -> DmElement:
    """``v1,...,vn`` or ``v1,...,vn@k``."""
    body, _, k = text.partition("@")
    try:
        v = tuple(int(t) for t in body.strip().strip("()").split(","))
        kk = int(k) if k.strip() else 0
    except ValueError:
        raise InputError(f"bad element literal {text!r}; expected v1,...,vn[@k]") from None
    if len(v) != n:
        raise InputError(f"element {text!r} has {len(v)} entries, matrix is {n}x{n}")
    if kk < 0:
        raise InputError("element exponent k must be nonnegative")
    return DmElement(v, kk)


def _partition(g, spec: str | None, kind: str) -> SplitPartition:
    """``u:e1,e2|e3;v:f`` -- blocks per vertex; unlisted vertices get one block."""
    if spec is None or spec == "singleton":
        return SplitPartition.singleton(g, kind)
    if spec == "trivial":
        return SplitPartition.trivial(g, kind)
    pick = g.out_edges if kind == "out" else g.in_edges
    mapping: dict[int, list[list[int]]] = {}
    try:
        for chunk in filter(None, (c.strip() for c in spec.split(";"))):
            vname, _, blocks = chunk.partition(":")
            v = g.vertex_index(vname.strip())
            mapping[v] = [[g.edge_index(e.strip()) for e in b.split(",") if e.strip()]
                          for b in blocks.split("|")]
    except KeyError as exc:
        raise InputError(f"partition: {exc.args[0]}") from None
    for v in range(g.n):
        if v not in mapping and pick(v):
            mapping[v] = [pick(v)]
    return SplitPartition.from_mapping(mapping)


def _mat_json(m: IntMatrix) -> list[list[int]]:
    return m.to_lists()


def _mat_text(m: IntMatrix) -> str:
    return "[" + "; ".join(" ".join(map(str, r)) for r in m.data) + "]"


# --------------------------------------------------------------------------
# commands; each returns (report dict, human text, inconclusive flag)


def cmd_classify(args):
    g = _load_graph(args.graph)
    c = classify(g)
    names = lambda idx: [g.vertices[i] for i in idx]  # noqa: E731
    rep = {
        "vertices": list(g.vertices),
        "tag": c.tag.value,
        "cycle_length": c.cycle_length,
        "cycle_vertices": names(c.cycle_vertices),
        "sinks": names(c.sinks),
        "sources": names(c.sources),
        "has_sinks": c.has_sinks,
        "has_sources": c.has_sources,
        "is_essential": c.is_essential,
        "is_irreducible": c.is_irreducible,
    }
    tag = c.tag.value + (f"({c.cycle_length})" if c.cycle_length else "")
    lines = [
        f"vertex order: {' '.join(g.vertices)}",
        f"class: {tag}",
        f"sinks: {' '.join(rep['sinks']) or '-'}",
        f"sources: {' '.join(rep['sources']) or '-'}",
        f"essential: {str(c.is_essential).lower()}",
        f"irreducible: {str(c.is_irreducible).lower()}",
    ]
    if c.cycle_vertices:
        lines.insert(2, f"cycle: {' '.join(rep['cycle_vertices'])}")
    return rep, "\n".join(lines), False


def cmd_k0(args):
    g = _load_graph(args.graph)
    inv = k0_lpa(g)
    rep = {"vertices": list(g.vertices), "adjacency": adjacency(g).to_lists(),
           "k0": {"free_rank": inv.group.free_rank, "torsion": list(inv.group.torsion),
                  "unit_class": list(inv.unit_class.coords), "text": str(inv.group)}}
    text = f"vertex order: {' '.join(g.vertices)}\nK0 = {inv.group}\n[1] = {inv.unit_class}"
    return rep, text, False


def cmd_k0gr(args):
    g = _load_graph(args.graph)
    inv = k0gr_path_algebra(g) if args.path_algebra else k0gr_lpa(g, route=args.route)
    rep = {"vertices": list(g.vertices), "k0gr": inv.to_json(),
           "algebra": "path" if args.path_algebra else "leavitt"}
    return rep, f"vertex order: {' '.join(g.vertices)}\nK0gr = {inv}", False


def cmd_lpa_structure(args):
    g = _load_graph(args.graph)
    try:
        st = lpa_structure(g, cycle_vertex=args.cycle_vertex)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from None
    rep = {"vertices": list(g.vertices), "structure": st.to_json()}
    return rep, f"vertex order: {' '.join(g.vertices)}\nL(E) =gr {st}", False


def _split(args, kind):
    g = _load_graph(args.graph)
    p = _partition(g, args.partition, kind)
    try:
        h = (out_split if kind == "out" else in_split)(g, p)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep = {"vertices": list(h.vertices), "edges": [[e.name, h.vertices[e.source], h.vertices[e.range]] for e in h.edges],
           "adjacency": adjacency(h).to_lists()}
    return rep, format_graph(h).rstrip("\n"), False


def cmd_split_out(args):
    return _split(args, "out")


def cmd_split_in(args):
    return _split(args, "in")


def cmd_mat_iso(args):
    a, b = _algebra(args.a), _algebra(args.b)
    try:
        w = graded_iso(a, b)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if w is None:
        return {"isomorphic": False}, f"{format_algebra(a)} and {format_algebra(b)} are not graded isomorphic", False
    rep = {"isomorphic": True, "pi": list(w.pi), "sigma": list(w.sigma.coords),
           "taus": [list(t.coords) for t in w.taus]}
    text = (f"graded isomorphic\nsigma = {w.sigma}\npi = ({' '.join(map(str, w.pi))})\n"
            f"tau = ({', '.join(str(t) for t in w.taus)})")
    return rep, text, False


def cmd_mat_blocks(args):
    alg = _algebra(args.algebra)
    blocks = zero_component_blocks(alg)
    rep = {"algebra": format_algebra(alg), "blocks": list(blocks),
           "cosets": [[list(c.coords), m] for c, m in alg.cosets.multiplicities]}
    body = " x ".join(f"M{r}(A0)" if r > 1 else "A0" for r in blocks)
    return rep, f"blocks: {' '.join(map(str, blocks))}\ndegree 0 component = {body}", False


def cmd_predicates(args):
    alg = _algebra(args.algebra)
    rep = grading_report(alg)
    lines = [f"strongly graded: {str(rep['strongly_graded']).lower()}",
             f"crossed product: {str(rep['crossed_product']).lower()}",
             f"reason: {rep['reason']}"]
    rep = {"algebra": format_algebra(alg), **rep,
           "support_cosets": sorted(list(c.coords) for c in support_cosets(alg))}
    if args.degree is not None:
        try:
            gamma = parse_element(alg.base.grade_group, args.degree)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        inv = has_invertible_of_degree(alg, gamma)
        rep["invertible_of_degree"] = {"degree": list(gamma.coords), "exists": inv}
        rep["component_dim"] = component_dim(alg, gamma)
        lines.append(f"invertible homogeneous element of degree {gamma}: {str(inv).lower()}")
        lines.append(f"dim of degree {gamma} component: {rep['component_dim']}")
    return rep, "\n".join(lines), False


def cmd_dm_eval(args):
    m = _load_matrix(args.matrix)
    try:
        t = DimensionTriple(m)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    op = args.op
    need_y = op in ("equal", "add")
    if op != "unit" and args.x is None:
        raise InputError(f"--x is required for {op}")
    if need_y and args.y is None:
        raise InputError(f"--y is required for {op}")
    x = _element(args.x, t.n) if args.x is not None else None
    y = _element(args.y, t.n) if need_y else None
    elem_json = lambda e: {"v": list(e.v), "k": e.k}  # noqa: E731
    if op == "equal":
        r = dm_equal(t, x, y)
        return {"op": op, "result": r}, str(r).lower(), False
    if op == "add":
        r = dm_add(t, x, y)
        return {"op": op, "result": elem_json(r)}, str(r), False
    if op == "shift":
        r = dm_shift(t, x)
        return {"op": op, "result": elem_json(r)}, str(r), False
    if op == "unshift":
        r = dm_unshift(t, x)
        return {"op": op, "result": elem_json(r)}, str(r), False
    if op == "unit":
        r = order_unit(t)
        return {"op": op, "result": elem_json(r)}, str(r), False
    res = dm_positive(t, x, args.bound)
    rep = {"op": op, "result": res.kind.value, "exponent": res.exponent,
           "certificate": res.certificate.value if res.certificate else None}
    return rep, str(res), res.kind is PositivityKind.UNKNOWN


def cmd_se_verify(args):
    a, b, r, s = (_load_matrix(x) for x in (args.a, args.b, args.r, args.s))
    try:
        ok = verify_se_witness(a, b, r, s, args.lag)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return {"valid": ok}, "valid shift equivalence" if ok else "not a shift equivalence witness", False


def _chain_from_json(text: str, a: IntMatrix) -> SseChain:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"chain: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if isinstance(data, dict):
        data = data.get("chain", [])
    steps = []
    cur = a
    try:
        for item in data:
            rr, ss = (item["R"], item["S"]) if isinstance(item, dict) else item
            r, s = IntMatrix.from_rows(rr), IntMatrix.from_rows(ss)
            nxt = s @ r
            steps.append(SseStep(cur, nxt, r, s))
            cur = nxt
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"chain: malformed step ({exc})") from None
    return SseChain(tuple(steps))


def _chain_json(chain: SseChain) -> list[dict]:
    return [{"R": _mat_json(st.r), "S": _mat_json(st.s)} for st in chain.steps]


def cmd_sse_verify(args):
    a, b = _load_matrix(args.a), _load_matrix(args.b)
    chain = _chain_from_json(_read(args.chain), a)
    ok = all(verify_ese_step(st.source, st.target, st.r, st.s) for st in chain.steps)
    end = chain.steps[-1].target if chain.steps else a
    ok = ok and end == b
    rep = {"valid": ok, "matrices": [_mat_json(m) for m in chain.matrices]}
    text = ("valid" if ok else "invalid") + " strong shift equivalence chain"
    if chain.steps:
        text += "\n" + " ~ ".join(_mat_text(m) for m in chain.matrices)
    return rep, text, False


def cmd_sse_search(args):
    a, b = _load_matrix(args.a), _load_matrix(args.b)
    try:
        chain = sse_search(a, b, args.max_inner_dim, args.max_entry, args.max_depth)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if chain is None:
        rep = {"found": False, "chain": None,
               "bounds": [args.max_inner_dim, args.max_entry, args.max_depth]}
        return rep, "no chain within bounds (not a refutation)", True
    rep = {"found": True, "chain": _chain_json(chain), "matrices": [_mat_json(m) for m in chain.matrices]}
    lines = [f"chain of length {len(chain)}"]
    for i, st in enumerate(chain.steps, 1):
        lines.append(f"step {i}: R = {_mat_text(st.r)}  S = {_mat_text(st.s)}  -> {_mat_text(st.target)}")
    return rep, "\n".join(lines), False


def cmd_se_refute(args):
    a, b = _load_matrix(args.a), _load_matrix(args.b)
    for m in (a, b):
        if not m.is_square:
            raise InputError("se-refute needs square matrices")
    ref = se_refute(a, b)
    if ref is None:
        return {"refuted": False}, "not refuted (no distinguishing invariant found)", True
    rep = {"refuted": True, "invariant": ref.invariant, "left": ref.left, "right": ref.right}
    return rep, f"refuted by {ref}", False


def cmd_gfield_k0gr(args):
    try:
        gamma = parse_group(args.group)
        gens = [parse_element(gamma, s) for s in args.support.split(";") if s.strip()] if args.support else []
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sub = SubgroupPresentation(gamma, tuple(gens))
    pic = picgr_graded_field(gamma, sub)
    inv = (k0gr_graded_local if args.local else k0gr_graded_field)(gamma, sub)
    rep = {"k0gr": inv.to_json(), "picgr": {"free_rank": pic.free_rank, "torsion": list(pic.torsion),
                                            "text": str(pic)}}
    return rep, f"K0gr = {inv}\nPicgr = {pic}", False


COMMANDS = {
    "classify": (cmd_classify, "structural class of a graph"),
    "k0": (cmd_k0, "K0 of the Leavitt path algebra"),
    "k0gr": (cmd_k0gr, "graded K0 of the Leavitt (or path) algebra"),
    "lpa-structure": (cmd_lpa_structure, "graded matrix model of the Leavitt path algebra"),
    "split-out": (cmd_split_out, "out-split a graph"),
    "split-in": (cmd_split_in, "in-split a graph"),
    "mat-iso": (cmd_mat_iso, "graded isomorphism of two shifted matrix algebras"),
    "mat-blocks": (cmd_mat_blocks, "block sizes of the degree-0 component"),
    "predicates": (cmd_predicates, "strongly graded / crossed product predicates"),
    "dm-eval": (cmd_dm_eval, "arithmetic and positivity in a dimension triple"),
    "se-verify": (cmd_se_verify, "verify a shift equivalence witness"),
    "sse-verify": (cmd_sse_verify, "verify a strong shift equivalence chain"),
    "sse-search": (cmd_sse_search, "bounded search for a strong shift equivalence chain"),
    "se-refute": (cmd_se_refute, "try to refute shift equivalence"),
    "gfield-k0gr": (cmd_gfield_k0gr, "graded K0 and graded Picard group of a graded field"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the machine-readable report")
    common.add_argument("--strict", action="store_true", help="exit 3 on inconclusive results")

    parser = _Parser(prog="gradedk", description="Graded K-theory of graph algebras and shifted matrix algebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name):
        return sub.add_parser(name, parents=[common], help=COMMANDS[name][1])

    for name in ("classify", "k0", "lpa-structure"):
        p = add(name)
        p.add_argument("--graph", required=True)
        if name == "lpa-structure":
            p.add_argument("--cycle-vertex", help="cycle vertex used for comets")

    p = add("k0gr")
    p.add_argument("--graph", required=True)
    p.add_argument("--route", choices=["triple"], help="force the dimension-triple description")
    p.add_argument("--path-algebra", action="store_true", help="graded K0 of the path algebra instead")

    for name in ("split-out", "split-in"):
        p = add(name)
        p.add_argument("--graph", required=True)
        p.add_argument("--partition", help="'singleton' (default), 'trivial', or 'v:e1,e2|e3;w:f'")

    p = add("mat-iso")
    p.add_argument("a")
    p.add_argument("b")
    p = add("mat-blocks")
    p.add_argument("algebra")
    p = add("predicates")
    p.add_argument("algebra")
    p.add_argument("--degree", help="also test for an invertible homogeneous element of this degree")

    p = add("dm-eval")
    p.add_argument("--matrix", required=True)
    p.add_argument("--op", required=True, choices=["equal", "add", "shift", "unshift", "positive", "unit"])
    p.add_argument("--x", help="element v1,...,vn[@k]")
    p.add_argument("--y", help="second element for equal/add")
    p.add_argument("--bound", type=int, help="positivity search bound")

    p = add("se-verify")
    for flag in ("--a", "--b", "--r", "--s"):
        p.add_argument(flag, required=True)
    p.add_argument("--lag", type=int, required=True)

    p = add("sse-verify")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--chain", required=True, help="JSON list of {\"R\": ..., \"S\": ...} steps")

    p = add("sse-search")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--max-inner-dim", type=int, default=3)
    p.add_argument("--max-entry", type=int, default=1)
    p.add_argument("--max-depth", type=int, default=3)

    p = add("se-refute")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = add("gfield-k0gr")
    p.add_argument("--group", required=True, help="e.g. 'Z' or 'Z/2 x Z/2'")
    p.add_argument("--support", default="", help="subgroup generators separated by ';', e.g. '3'")
    p.add_argument("--local", action="store_true", help="treat --support as the invertible degrees of a graded local ring")
    return parser


_VALUE_FLAGS = ("--x", "--y", "--degree", "--support")
_NEGATIVE = re.compile(r"^-\d")


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--x -1,2`` into ``--x=-1,2`` so argparse does not read a flag."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and _NEGATIVE.match(nxt):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func = COMMANDS[args.command][0]
    try:
        rep, text, inconclusive = func(args)
    except InputError as exc:
        print(f"gradedk {args.command}: {exc}", file=stderr)
        return EXIT_INPUT
    except HypothesisError as exc:
        print(f"gradedk {args.command}: hypothesis not met: {exc}", file=stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps({"schema": SCHEMA, "command": args.command, **rep}, sort_keys=True), file=stdout)
    else:
        print(text, file=stdout)
    return EXIT_UNKNOWN if (inconclusive and args.strict) else EXIT_OK


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
