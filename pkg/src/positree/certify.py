"""Self-contained certificates for every pipeline command.

A certificate embeds its inputs verbatim (with digests), the parameters,
the result payload, and a checklist of named verification bits.
``verify_certificate`` reparses the embedded data, recomputes every
checklist entry from scratch and compares; any tampering with inputs,
payload or checklist flips the verdict.  Serialization is canonical
JSON, so identical runs yield byte-identical certificates.
"""

from __future__ import annotations

import hashlib
import json
from typing import Callable

from .adversary import HaltingTable, decode_halting, in_sparse_class, adversarial_tree, one_positions
from .bits import lenlex_key
from .clopen import ClopenTree
from .density import density_maximization_analysis, density_witness_greedy
from .dyadic import Dyadic, ONE
from .errors import MalformedCertificate, UnknownVersion
from .extract import Coloring, extract_perfect, homogeneous_embedding
from .embedding import PerfectEmbedding
from .finite import FiniteTree
from .forcing import (
    BUILTIN_FUNCTIONALS,
    Condition,
    Constant,
    Split,
    TreeFunctional,
    condition_is_valid,
    is_condition,
    outputs_agree,
    table_functional,
)
from .kucera import has_threshold_property, prune
from .randomgen import GenSpec, gen_random_positive_tree

CERT_FORMAT = "certificate/v1"
CONDITION_FORMAT = "condition/v1"
COLORING_FORMAT = "coloring/v1"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _input_entry(text: str) -> dict:
    return {"digest": digest(text), "text": text}


def make_certificate(command: str, inputs: dict[str, str], params: dict, payload: dict, checks: dict[str, bool]) -> dict:
    return {
        "format": CERT_FORMAT,
        "command": command,
        "inputs": {name: _input_entry(text) for name, text in sorted(inputs.items())},
        "params": params,
        "payload": payload,
        "checks": checks,
    }


# -- record helpers -----------------------------------------------------


def condition_record(cond: Condition) -> dict:
    return {
        "format": CONDITION_FORMAT,
        "stem": cond.stem.as_sorted_list(),
        "reservoir": cond.reservoir.to_text(),
        "ambient": cond.ambient.to_text(),
    }


def condition_from_record(record: dict) -> Condition:
    if record.get("format") != CONDITION_FORMAT:
        raise UnknownVersion(f"unsupported condition format: {record.get('format')!r}")
    return Condition(
        stem=FiniteTree(frozenset(record["stem"])),
        reservoir=ClopenTree.from_text(record["reservoir"]),
        ambient=ClopenTree.from_text(record["ambient"]),
    )


def coloring_record(coloring: Coloring) -> dict:
    return {
        "format": COLORING_FORMAT,
        "depth": coloring.depth,
        "arity": coloring.arity,
        "colors": {k: coloring.colors[k] for k in sorted(coloring.colors, key=lenlex_key)},
    }


def coloring_from_record(record: dict) -> Coloring:
    if record.get("format") != COLORING_FORMAT:
        raise UnknownVersion(f"unsupported coloring format: {record.get('format')!r}")
    return Coloring(int(record["depth"]), int(record["arity"]), dict(record["colors"]))


def _functional_from_params(params: dict) -> TreeFunctional:
    if "functional_table" in params:
        return table_functional(params["functional_table"])
    name = params["functional"]
    if name not in BUILTIN_FUNCTIONALS:
        raise MalformedCertificate(f"unknown functional {name!r}")
    return BUILTIN_FUNCTIONALS[name]


# -- certificate builders ------------------------------------------------


def gen_certificate(spec: GenSpec, tree: ClopenTree) -> dict:
    checks = {
        "measure_at_or_above_target": tree.measure() >= spec.target,
        "regeneration_matches": gen_random_positive_tree(spec).leaves == tree.leaves,
    }
    params = {"depth": spec.depth, "target": str(spec.target), "seed": spec.seed}
    return make_certificate("gen", {}, params, {"tree": tree.to_text()}, checks)


def _recheck_gen(cert: dict) -> dict:
    params = cert["params"]
    spec = GenSpec(int(params["depth"]), Dyadic.parse(params["target"]), int(params["seed"]))
    tree = ClopenTree.from_text(cert["payload"]["tree"])
    return {
        "measure_at_or_above_target": tree.measure() >= spec.target,
        "regeneration_matches": gen_random_positive_tree(spec).leaves == tree.leaves,
    }


def _prune_checks(tree: ClopenTree, eps: Dyadic, result: ClopenTree, pruned: list[str], empty: bool) -> dict:
    incomparable = all(
        not (a != b and b.startswith(a))
        for a in pruned
        for b in pruned
    )
    if empty:
        return {
            "flagged_empty": result.is_empty,
            "pruned_incomparable": incomparable,
            "result_inside_input": result.is_subset(tree),
        }
    again, report = prune(result, eps)
    return {
        "threshold_property": has_threshold_property(result, eps),
        "measure_above_margin": result.measure() > tree.measure() - eps,
        "result_inside_input": result.is_subset(tree),
        "pruned_incomparable": incomparable,
        "fixpoint": again.leaves == result.leaves and not report.events,
    }


def prune_certificate(tree: ClopenTree, eps: Dyadic, result: ClopenTree, report) -> dict:
    empty = result.is_empty
    payload = {
        "result": result.to_text(),
        "pruned": list(report.pruned),
        "events": list(report.events),
        "input_measure": str(report.input_measure),
        "output_measure": str(report.output_measure),
        "empty": empty,
    }
    checks = _prune_checks(tree, eps, result, list(report.pruned), empty)
    return make_certificate("prune", {"tree": tree.to_text()}, {"epsilon": str(eps)}, payload, checks)


def _recheck_prune(cert: dict) -> dict:
    tree = ClopenTree.from_text(cert["inputs"]["tree"]["text"])
    eps = Dyadic.parse(cert["params"]["epsilon"])
    result = ClopenTree.from_text(cert["payload"]["result"])
    return _prune_checks(tree, eps, result, list(cert["payload"]["pruned"]), bool(cert["payload"]["empty"]))


def extract_certificate(tree: ClopenTree, eps: Dyadic, witness: FiniteTree, cert_data) -> dict:
    payload = {
        "witness": witness.as_sorted_list(),
        "schedule": list(cert_data.schedule.values),
        "schedule_truncated": cert_data.schedule.truncated,
        "delta": str(cert_data.delta),
        "witness_index": cert_data.witness_index,
        "input_measure": str(cert_data.input_measure),
        "pruned_measure": str(cert_data.pruned_measure),
    }
    checks = dict(cert_data.checks)
    checks["reproduces"] = True
    return make_certificate("extract", {"tree": tree.to_text()}, {"epsilon": str(eps)}, payload, checks)


def _recheck_extract(cert: dict) -> dict:
    tree = ClopenTree.from_text(cert["inputs"]["tree"]["text"])
    eps = Dyadic.parse(cert["params"]["epsilon"])
    witness, data = extract_perfect(tree, eps)
    payload = cert["payload"]
    out = dict(data.checks)
    out["reproduces"] = (
        witness.as_sorted_list() == list(payload["witness"])
        and list(data.schedule.values) == list(payload["schedule"])
        and str(data.delta) == payload["delta"]
        and data.witness_index == payload["witness_index"]
    )
    return out


def _density_checks(tree: ClopenTree, eps: Dyadic, delta: Dyadic, payload: dict) -> dict:
    greedy = payload["greedy"]
    counts = tree.level_count_arrays()

    def dense(sigma: str) -> bool:
        c = counts[len(sigma)][int(sigma, 2) if sigma else 0]
        return Dyadic(c, tree.depth) > (ONE - eps).shift_down(len(sigma))

    analysis = density_maximization_analysis(tree, eps, delta)
    earlier = [
        s
        for n in range(len(greedy) + 1)
        for s in ([format(i, f"0{n}b") for i in range(1 << n)] if n else [""])
        if lenlex_key(s) < lenlex_key(greedy)
    ]
    return {
        "greedy_valid": dense(greedy),
        "greedy_minimal": not any(dense(s) for s in earlier),
        "maximization_valid": dense(payload["maximization"]),
        "analysis_matches": (
            analysis.witness == payload["maximization"]
            and analysis.n == payload["n"]
            and analysis.k == payload["k"]
            and analysis.level == payload["level"]
        ),
    }


def density_certificate(tree: ClopenTree, eps: Dyadic, delta: Dyadic) -> dict:
    greedy = density_witness_greedy(tree, eps)
    analysis = density_maximization_analysis(tree, eps, delta)
    payload = {
        "greedy": greedy,
        "maximization": analysis.witness,
        "n": analysis.n,
        "k": analysis.k,
        "level": analysis.level,
    }
    params = {"epsilon": str(eps), "delta": str(delta)}
    checks = _density_checks(tree, eps, delta, payload)
    return make_certificate("density", {"tree": tree.to_text()}, params, payload, checks)


def _recheck_density(cert: dict) -> dict:
    tree = ClopenTree.from_text(cert["inputs"]["tree"]["text"])
    eps = Dyadic.parse(cert["params"]["epsilon"])
    delta = Dyadic.parse(cert["params"]["delta"])
    return _density_checks(tree, eps, delta, cert["payload"])


def adversary_encode_certificate(table: HaltingTable, depth: int, tree: ClopenTree) -> dict:
    table_text = canonical_json(table.to_record())
    checks = {"tree_matches_table": adversarial_tree(table, depth).leaves == tree.leaves}
    return make_certificate(
        "adversary-encode",
        {"table": table_text},
        {"depth": depth},
        {"tree": tree.to_text()},
        checks,
    )


def _recheck_adversary_encode(cert: dict) -> dict:
    table = HaltingTable.from_record(json.loads(cert["inputs"]["table"]["text"]))
    tree = ClopenTree.from_text(cert["payload"]["tree"])
    return {"tree_matches_table": adversarial_tree(table, int(cert["params"]["depth"])).leaves == tree.leaves}


def _decode_checks(table: HaltingTable, sigma: str, count: int, decoded_record: dict) -> dict:
    member = in_sparse_class(table, sigma)
    enough = len(one_positions(sigma)) > count
    matches = False
    if member and enough:
        matches = decode_halting(sigma, count, table).to_record() == decoded_record
    return {
        "member_of_class": member,
        "enough_ones": enough,
        "decoded_equals_restriction": matches
        and decoded_record == table.restricted(count).to_record(),
    }


def adversary_decode_certificate(table: HaltingTable, sigma: str, count: int) -> dict:
    decoded = decode_halting(sigma, count, table)
    payload = {"decoded": decoded.to_record()}
    checks = _decode_checks(table, sigma, count, decoded.to_record())
    return make_certificate(
        "adversary-decode",
        {"table": canonical_json(table.to_record())},
        {"sigma": sigma, "count": count},
        payload,
        checks,
    )


def _recheck_adversary_decode(cert: dict) -> dict:
    table = HaltingTable.from_record(json.loads(cert["inputs"]["table"]["text"]))
    return _decode_checks(
        table,
        cert["params"]["sigma"],
        int(cert["params"]["count"]),
        cert["payload"]["decoded"],
    )


def _force_checks(cond: Condition, phi: TreeFunctional, target: str, lmax: int, payload: dict) -> dict:
    if payload["kind"] == "split":
        ext = FiniteTree(frozenset(payload["extension"]))
        n = int(payload["input_index"])
        out = phi.apply(ext, n)
        return {
            "wrong_output": out is not None and out != int(target[n]),
            "valid_condition": is_condition(ext, cond.reservoir, cond.ambient),
            "end_extends": ext.end_extends(cond.stem),
        }
    stable = ClopenTree.from_text(payload["stable"])
    return {
        "stable_tree_matches": stable.leaves == cond.working_tree().leaves,
        "outputs_agree": outputs_agree(stable, cond.stem, phi, int(payload["proof_depth"]), len(target)),
    }


def force_step_certificate(
    cond: Condition,
    phi: TreeFunctional,
    target: str,
    lmax: int,
    result,
    table_record: dict | None = None,
) -> dict:
    if isinstance(result, Split):
        payload = {
            "kind": "split",
            "extension": result.extension.as_sorted_list(),
            "input_index": result.input_index,
        }
    elif isinstance(result, Constant):
        payload = {
            "kind": "constant",
            "stable": result.stable_tree.to_text(),
            "proof_depth": result.proof_depth,
        }
    else:
        raise TypeError(f"not a step result: {result!r}")
    params: dict = {"target": target, "lmax": lmax, "functional": phi.name}
    if table_record is not None:
        params["functional_table"] = table_record
    checks = _force_checks(cond, phi, target, lmax, payload)
    return make_certificate(
        "force-step",
        {"condition": canonical_json(condition_record(cond))},
        params,
        payload,
        checks,
    )


def _recheck_force_step(cert: dict) -> dict:
    cond = condition_from_record(json.loads(cert["inputs"]["condition"]["text"]))
    phi = _functional_from_params(cert["params"])
    return _force_checks(
        cond,
        phi,
        cert["params"]["target"],
        int(cert["params"]["lmax"]),
        cert["payload"],
    )


def _tt1_checks(coloring: Coloring, k: int, payload: dict) -> dict:
    emb = PerfectEmbedding(int(payload["color_arity"]), tuple((a, b) for a, b in payload["embedding"]))
    color = int(payload["color"])
    try:
        found_color, found = homogeneous_embedding(coloring, k)
        reproduces = found_color == color and found.images == emb.images
    except Exception:
        reproduces = False
    return {
        "embedding_valid": emb.arity == k and emb.is_valid(),
        "monochromatic": all(coloring(img) == color for img in emb.image_nodes()),
        "reproduces": reproduces,
    }


def tt1_certificate(coloring: Coloring, k: int) -> dict:
    color, emb = homogeneous_embedding(coloring, k)
    payload = {
        "color": color,
        "color_arity": emb.arity,
        "embedding": [[a, b] for a, b in emb.images],
    }
    checks = _tt1_checks(coloring, k, payload)
    return make_certificate(
        "tt1",
        {"coloring": canonical_json(coloring_record(coloring))},
        {"k": k},
        payload,
        checks,
    )


def _recheck_tt1(cert: dict) -> dict:
    coloring = coloring_from_record(json.loads(cert["inputs"]["coloring"]["text"]))
    return _tt1_checks(coloring, int(cert["params"]["k"]), cert["payload"])


_RECHECKERS: dict[str, Callable[[dict], dict]] = {
    "gen": _recheck_gen,
    "prune": _recheck_prune,
    "extract": _recheck_extract,
    "density": _recheck_density,
    "adversary-encode": _recheck_adversary_encode,
    "adversary-decode": _recheck_adversary_decode,
    "force-step": _recheck_force_step,
    "tt1": _recheck_tt1,
}


def verify_certificate(cert: dict) -> bool:
    """Recompute every checklist entry from the embedded data and
    compare.  True only when digests match, the stored checklist is
    reproduced exactly, and every entry passed."""
    if not isinstance(cert, dict):
        raise MalformedCertificate("certificate must be a JSON object")
    if cert.get("format") != CERT_FORMAT:
        raise UnknownVersion(f"unsupported certificate format: {cert.get('format')!r}")
    for key in ("command", "inputs", "params", "payload", "checks"):
        if key not in cert:
            raise MalformedCertificate(f"missing field {key!r}")
    command = cert["command"]
    if command not in _RECHECKERS:
        raise MalformedCertificate(f"unknown command {command!r}")
    for entry in cert["inputs"].values():
        if set(entry) != {"digest", "text"}:
            raise MalformedCertificate("malformed input entry")
        if digest(entry["text"]) != entry["digest"]:
            return False
    try:
        recomputed = _RECHECKERS[command](cert)
    except (UnknownVersion, MalformedCertificate):
        raise
    except Exception:
        return False
    stored = cert["checks"]
    return recomputed == stored and all(bool(v) for v in stored.values())
