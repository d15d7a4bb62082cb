"""egmc command line: keys, encryption, parameter tables, estimates, distinguishers."""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import pke, security
from .egmc import EgmcParams, sample_egmc, inner_code
from .gf import pack_elements, packed_size, unpack_elements
from .matrixcode import (MatrixCodeBasis, deserialize_code, left_stabilizer, random_code,
                         right_stabilizer, serialize_code)

EXIT_OK = 0
EXIT_PARAMS = 2
EXIT_IO = 3
EXIT_DECRYPT = 4

OUT_DIR_ENV = "EGMC_OUT_DIR"
DISTINGUISH_LIMIT = 2 ** 14


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _out_dir(args) -> Path:
    return Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or ".")


def _seed(args) -> bytes:
    if args.seed is None:
        return os.urandom(32)
    try:
        return bytes.fromhex(args.seed)
    except ValueError:
        raise CliError(f"seed is not valid hex: {args.seed!r}", EXIT_PARAMS)


def _params(args, need_decodable: bool = True) -> tuple[EgmcParams, Optional[str]]:
    if getattr(args, "set", None):
        try:
            ps = security.get_set(args.set)
        except KeyError:
            names = ", ".join(p.name for p in security.registry())
            raise CliError(f"unknown parameter set {args.set!r}; known sets: {names}", EXIT_PARAMS)
        p = ps.params
        if need_decodable and not p.decodable:
            raise CliError(f"{ps.name}: r={p.r} exceeds the decoding radius {p.t}", EXIT_PARAMS)
        return p, ps.name
    vals = [getattr(args, f) for f in ("q", "m", "k", "l1", "l2", "r")]
    if any(v is None for v in vals):
        raise CliError("give --set NAME or all of --q --m --k --l1 --l2 --r", EXIT_PARAMS)
    q, m, k, l1, l2, r = vals
    try:
        return EgmcParams(q, m, m, k, l1, l2, r, strict=need_decodable), None
    except ValueError as exc:
        raise CliError(f"invalid parameters: {exc}", EXIT_PARAMS)


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO)


def _write(path, data: bytes):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO)


def _load(fn, data: bytes, what: str):
    try:
        return fn(data)
    except pke.FormatError as exc:
        raise CliError(f"malformed {what}: {exc}", EXIT_IO)


def _emit(args, payload: dict, text: str):
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _params_dict(p: EgmcParams) -> dict:
    return dict(q=p.q, m=p.m, k=p.k, l1=p.l1, l2=p.l2, r=p.r)


# --- hex encodings of plaintexts ---

def encode_elements(q: int, values) -> str:
    return pack_elements(q, values).hex()


def decode_elements(q: int, text: str, count: int) -> np.ndarray:
    try:
        raw = bytes.fromhex(text.strip())
    except ValueError:
        raise CliError("message is not valid hex", EXIT_PARAMS)
    if len(raw) != packed_size(q, count):
        raise CliError(f"message must be {packed_size(q, count)} bytes ({count} elements of F_{q})", EXIT_PARAMS)
    try:
        v = unpack_elements(q, raw, count)
    except ValueError as exc:
        raise CliError(f"bad message: {exc}", EXIT_PARAMS)
    if pack_elements(q, v) != raw:
        raise CliError("message has non-zero padding bits", EXIT_PARAMS)
    return v


# --- subcommands ---

def cmd_keygen(args) -> int:
    p, name = _params(args)
    seed = _seed(args)
    pk_mce, pk_nied, sk = pke.keygen(p, seed)
    out = _out_dir(args)
    prefix = args.prefix or name or "egmc"
    files = {
        "mceliece_pk": (out / f"{prefix}.mce.pk", pke.serialize_public_key(pk_mce)),
        "niederreiter_pk": (out / f"{prefix}.nied.pk", pke.serialize_public_key(pk_nied)),
        "sk": (out / f"{prefix}.sk", pke.serialize_secret_key(sk)),
    }
    report = {"params": _params_dict(p), "payload_bytes": pke.pk_payload_bytes(p), "files": {}}
    lines = [f"parameters q={p.q} m={p.m} k={p.k} l1={p.l1} l2={p.l2} r={p.r}",
             f"public key payload {pke.pk_payload_bytes(p)} B"]
    for key, (path, data) in files.items():
        _write(path, data)
        digest = hashlib.sha256(data).hexdigest()
        report["files"][key] = {"path": str(path), "bytes": len(data), "sha256": digest}
        lines.append(f"{key:16s} {path}  {len(data)} B  sha256 {digest[:16]}")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK


def cmd_encrypt(args) -> int:
    pk = _load(pke.deserialize_public_key, _read(args.pk), "public key")
    p = pk.params
    rng = pke.seeded_rng(_seed(args), b"encrypt")
    if args.scheme == "mceliece":
        if args.message is None:
            raise CliError("--message HEX is required for McEliece", EXIT_PARAMS)
        text = _read(args.message[1:]).decode() if args.message.startswith("@") else args.message
        mu = decode_elements(p.q, text, p.K)
        Y = pke.mce_encrypt(_as_mce(pk), mu, rng)
        ct = pke.serialize_ciphertext(p, Y, pke.SCHEME_MCE)
    else:
        mu = pke.random_plaintext(p, rng)
        c = pke.nied_encrypt(_as_nied(pk), mu)
        ct = pke.serialize_ciphertext(p, c, pke.SCHEME_NIED)
        if args.plaintext_out:
            _write(args.plaintext_out, (encode_elements(p.q, mu) + "\n").encode())
    _write(args.out, ct)
    _emit(args, {"ciphertext": str(args.out), "bytes": len(ct), "payload_bytes": len(ct) - 5},
          f"wrote {args.out} ({len(ct) - 5} B payload)")
    return EXIT_OK


def _as_mce(pk):
    return pk if isinstance(pk, pke.McEliecePublicKey) else pk.to_mceliece()


def _as_nied(pk):
    return pk if isinstance(pk, pke.NiederreiterPublicKey) else pk.to_niederreiter()


def cmd_decrypt(args) -> int:
    sk = _load(pke.deserialize_secret_key, _read(args.sk), "secret key")
    pk = _load(pke.deserialize_public_key, _read(args.pk), "public key")
    if sk.params != pk.params:
        raise CliError("secret and public key parameters differ", EXIT_PARAMS)
    p = sk.params
    try:
        scheme, body = pke.deserialize_ciphertext(p, _read(args.input))
    except pke.FormatError as exc:
        raise CliError(f"malformed ciphertext: {exc}", EXIT_IO)
    try:
        if scheme == pke.SCHEME_MCE:
            mu = pke.mce_decrypt(sk, _as_mce(pk), body)
        else:
            mu = pke.nied_decrypt(sk, _as_nied(pk), body)
    except (pke.DecodeError, pke.VerifyError) as exc:
        raise CliError(f"decryption failed: {exc}", EXIT_DECRYPT)
    text = encode_elements(p.q, mu) + "\n"
    if args.out:
        _write(args.out, text.encode())
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_params(args) -> int:
    sets = security.registry()
    if args.set:
        try:
            sets = [security.get_set(args.set)]
        except KeyError:
            raise CliError(f"unknown parameter set {args.set!r}", EXIT_PARAMS)
    rows = security.table_rows(sets)
    if args.json:
        for row, s in zip(rows, sets):
            row["claimed"] = s.claimed
        print(json.dumps(rows, indent=2))
    elif args.csv:
        sys.stdout.write(security.format_csv(rows))
    else:
        sys.stdout.write(security.format_table(rows))
    return EXIT_OK


def cmd_estimate(args) -> int:
    p, name = _params(args, need_decodable=False)
    rep = security.estimate(p)
    mrd = security.mrd_quantities(p)
    dual_b = security.dual_attack_threshold(p)
    payload = dict(params=_params_dict(p), name=name, **rep.as_dict(), d0=mrd.d0,
                   log2_min_weight_codewords=mrd.log2_codewords, dual_attack_b_max=dual_b,
                   minors_attack="see external estimators")
    payload = {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in payload.items()}
    if rep.polynomial_distinguisher:
        print("warning: l1 = l2 = 0, polynomial-time distinguisher applies", file=sys.stderr)
    lines = [
        f"parameters q={p.q} m={p.m} k={p.k} l1={p.l1} l2={p.l2} r={p.r}" + (f" ({name})" if name else ""),
        f"Struc.  {rep.structural_bits:.1f}",
        f"Comb.   {rep.kernel_bits}",
        f"Hyb.    {rep.hybrid_bits:.1f}  (a={rep.hybrid_a})",
        f"Alg.    {rep.algebraic_bits:.1f}  (a={rep.a_opt})",
        f"support minors, no guessing  {rep.support_minors_bits:.1f}  (b={rep.b_opt})",
        f"d0 = {mrd.d0}, log2 #codewords of weight d0 ~ {mrd.log2_codewords:.1f}",
        "dual attack: " + ("distinguisher inapplicable" if dual_b is None else f"b_max = {dual_b}"),
        "minors attack: see external estimators",
    ]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_sample_code(args) -> int:
    """Write a toy matrix code for the distinguisher."""
    p, _ = _params(args)
    rng = pke.seeded_rng(_seed(args), b"sample-code")
    pub, sk = sample_egmc(p, rng)
    if args.kind == "egmc":
        code = pub
    elif args.kind == "gabidulin":
        code = inner_code(sk)
    else:
        code = random_code(pub.field, pub.rows, pub.cols, pub.dim, rng)
    data = serialize_code(code)
    _write(args.out, data)
    _emit(args, {"path": str(args.out), "dim": code.dim, "rows": code.rows, "cols": code.cols},
          f"wrote {args.out}: dimension {code.dim} in {code.rows}x{code.cols}")
    return EXIT_OK


def distinguish(code: MatrixCodeBasis, m: Optional[int] = None) -> dict:
    """Stabilizer dimensions and a verdict; m defaults to min(rows, cols)."""
    if code.ambient_dim > DISTINGUISH_LIMIT:
        raise ValueError(f"ambient dimension {code.ambient_dim} exceeds {DISTINGUISH_LIMIT}")
    left, _ = left_stabilizer(code)
    right, _ = right_stabilizer(code)
    threshold = m if m is not None else min(code.rows, code.cols)
    verdict = "fqm-linear-structure" if max(left, right) >= threshold and threshold > 1 else "random-like"
    return {"left_stabilizer_dim": left, "right_stabilizer_dim": right, "threshold": threshold,
            "verdict": verdict}


def cmd_distinguish(args) -> int:
    try:
        code = deserialize_code(_read(args.code))
    except ValueError as exc:
        raise CliError(f"malformed code file: {exc}", EXIT_IO)
    if code.ambient_dim > DISTINGUISH_LIMIT:
        raise CliError(f"ambient dimension {code.ambient_dim} exceeds the guard {DISTINGUISH_LIMIT}",
                       EXIT_PARAMS)
    res = distinguish(code, args.m)
    _emit(args, res, f"left stabilizer dim  {res['left_stabilizer_dim']}\n"
                     f"right stabilizer dim {res['right_stabilizer_dim']}\n"
                     f"verdict              {res['verdict']}")
    return EXIT_OK


# --- argument parsing ---

def _add_param_args(p: argparse.ArgumentParser):
    p.add_argument("--set", help="named parameter set, e.g. egmc128a")
    for f in ("q", "m", "k", "l1", "l2", "r"):
        p.add_argument(f"--{f}", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="egmc", description="EGMC rank-metric encryption toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate McEliece/Niederreiter public keys and a secret key")
    _add_param_args(p)
    p.add_argument("--seed", help="hex seed (random if omitted)")
    p.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or .)")
    p.add_argument("--prefix", help="file name prefix (default: set name)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt under a public key")
    p.add_argument("--pk", required=True)
    p.add_argument("--scheme", choices=("mceliece", "niederreiter"), default="niederreiter")
    p.add_argument("--message", help="McEliece plaintext as hex, or @FILE")
    p.add_argument("--plaintext-out", help="Niederreiter: where to record the sampled plaintext")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", help="hex seed for the encryption randomness")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt and verify a ciphertext")
    p.add_argument("--sk", required=True)
    p.add_argument("--pk", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", help="plaintext hex output (default stdout)")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("params", help="recomputed table of the named parameter sets")
    p.add_argument("--list", action="store_true", help="all sets (the default)")
    p.add_argument("--set")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("estimate", help="attack-cost report for one parameter choice")
    _add_param_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sample-code", help="write a toy matrix code (egmc, gabidulin or random)")
    _add_param_args(p)
    p.add_argument("--kind", choices=("egmc", "gabidulin", "random"), default="egmc")
    p.add_argument("--seed")
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sample_code)

    p = sub.add_parser("distinguish", help="stabilizer-algebra test on a serialized matrix code")
    p.add_argument("--code", required=True)
    p.add_argument("--m", type=int, help="extension degree to compare against")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_distinguish)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"egmc: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
