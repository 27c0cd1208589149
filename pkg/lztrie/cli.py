"""Command line interface: ``lztrie {compress,decompress,verify,bench,corpus}``.

``compress`` and ``decompress`` are filters reading stdin (or a file) and
writing stdout (or a file). Statistics are never written to stdout but to
the CSV file given by ``--stats``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import ExitStack
from pathlib import Path
from typing import BinaryIO, NoReturn

from pydantic import ValidationError

from lztrie.accounting import AllocAccount, Stopwatch
from lztrie.backend import DEFAULT_SEED
from lztrie.bench import (
    CorpusSpec,
    StatsRecord,
    generate_corpus,
    records_to_dataset,
    run_bench,
    write_stats,
)
from lztrie.coder import (
    CoderError,
    ContainerHeader,
    compress_stream,
    decompress_stream,
    iter_stream_bytes,
    write_container,
)
from lztrie.config import RunConfig
from lztrie.rolling import CollisionDetected, factorize_verified, warn_unverified

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CORRUPT = 3
EXIT_COLLISION = 4

BACKENDS = ["binary", "ternary", "hash", "hash+", "cht", "rolling", "rolling+"]
CORPUS_KINDS = ["random-uniform", "repetitive-period-k", "all-equal", "english-sample-file"]


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_io_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", nargs="?", type=Path, help="input file (default: stdin)")
    parser.add_argument("-o", "--output", type=Path, help="output file (default: stdout)")


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-f", "--format", choices=["lz78", "lzw"], default="lz78")
    parser.add_argument("-b", "--backend", choices=BACKENDS, default="binary")
    parser.add_argument(
        "--rolling-fn", choices=["fermat", "id37"], help="fingerprint family (rolling backends)"
    )
    parser.add_argument(
        "--scramble",
        action="store_true",
        help="address the fingerprint table through a mixing hash (rolling backends)",
    )
    parser.add_argument("--width", type=int, help="fingerprint width in bits (rolling backends)")
    parser.add_argument("--hash-family", choices=["lcg", "xorshift"], help="cht hash family")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--stats", type=Path, help="CSV file receiving the run statistics")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="lztrie", description="LZ78/LZW compression with LZ tries")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="log to stderr (-vv for debug)"
    )
    commands = parser.add_subparsers(dest="mode", required=True, parser_class=_ArgumentParser)

    compress = commands.add_parser("compress", help="compress a byte stream")
    _add_io_arguments(compress)
    _add_run_arguments(compress)
    compress.add_argument("--length", type=int, help="input length, required for pipes")
    compress.add_argument(
        "--verify", action="store_true", help="check the factorization (buffers the input)"
    )

    decompress = commands.add_parser("decompress", help="decompress a container")
    _add_io_arguments(decompress)

    verify = commands.add_parser("verify", help="factorize and check the factorization")
    verify.add_argument("input", nargs="?", type=Path)
    _add_run_arguments(verify)

    bench = commands.add_parser("bench", help="run backends on generated corpora")
    bench.add_argument("-b", "--backend", dest="backends", action="append", choices=BACKENDS)
    bench.add_argument("-f", "--format", dest="formats", action="append", choices=["lz78", "lzw"])
    bench.add_argument("-k", "--kind", dest="kinds", action="append", choices=CORPUS_KINDS)
    bench.add_argument("--length", type=int, default=1 << 16)
    bench.add_argument("--alphabet", type=int, default=256)
    bench.add_argument("--period", type=int, default=5)
    bench.add_argument("--text", type=Path, help="text of the english-sample-file corpus")
    bench.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bench.add_argument("--stats", type=Path, help="CSV output (default: stdout)")

    corpus = commands.add_parser("corpus", help="write a generated corpus")
    corpus.add_argument("kind", choices=CORPUS_KINDS)
    corpus.add_argument("--length", type=int, required=True)
    corpus.add_argument("--alphabet", type=int, default=256)
    corpus.add_argument("--period", type=int, default=5)
    corpus.add_argument("--text", type=Path)
    corpus.add_argument("--seed", type=int, default=DEFAULT_SEED)
    corpus.add_argument("-o", "--output", type=Path)
    return parser


def _stream_length(stream: BinaryIO) -> int | None:
    try:
        if not stream.seekable():
            return None
        position = stream.tell()
        end = stream.seek(0, 2)
        stream.seek(position)
        return end - position
    except OSError:
        return None


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        mode=args.mode,
        format=args.format,
        backend=args.backend,
        rolling_fn=args.rolling_fn,
        scramble=args.scramble,
        width=args.width,
        hash_family=args.hash_family,
        seed=args.seed,
        length=getattr(args, "length", None),
        stats=args.stats,
        verify=getattr(args, "verify", False),
    )


def run_compress(
    config: RunConfig, source: BinaryIO, out: BinaryIO, corpus: str = "stdin"
) -> StatsRecord:
    """Compress ``source`` to ``out`` and return the statistics of the run."""
    account = AllocAccount()
    trie = config.create_backend(account)

    with Stopwatch() as watch:
        if config.verify:
            data = source.read()
            if config.length is not None and config.length != len(data):
                raise UsageError(
                    f"--length {config.length} differs from the input length {len(data)}"
                )
            factors = factorize_verified(data, trie, config.format)
            header = ContainerHeader(config.format, len(data), trie.backend_id, config.seed)
            result = write_container(factors, header, out)
        else:
            n = config.length if config.length is not None else _stream_length(source)
            if n is None:
                raise UsageError("the input length is unknown: pass --length when reading a pipe")
            if config.is_monte_carlo:
                warn_unverified(config.backend)
            result = compress_stream(
                iter_stream_bytes(source), n, out, trie, config.format, config.seed
            )

    stats = trie.stats()
    return StatsRecord(
        backend=config.backend,
        format=config.format,
        corpus=corpus,
        n=result.header.n,
        z=result.z,
        time_ms=watch.elapsed_ms,
        peak_bytes=account.peak_bytes(),
        collisions=stats.collisions,
        table_M=stats.table_size_M,
        seed=config.seed,
    )


def run_decompress(source: BinaryIO, out: BinaryIO) -> ContainerHeader:
    return decompress_stream(source, out)


def run_verify(config: RunConfig, source: BinaryIO, corpus: str = "stdin") -> StatsRecord:
    data = source.read()
    account = AllocAccount()
    trie = config.create_backend(account)
    with Stopwatch() as watch:
        factors = factorize_verified(data, trie, config.format)
    stats = trie.stats()
    return StatsRecord(
        config.backend,
        config.format,
        corpus,
        len(data),
        len(factors),
        watch.elapsed_ms,
        account.peak_bytes(),
        stats.collisions,
        stats.table_size_M,
        config.seed,
    )


def _corpus_spec(args: argparse.Namespace, kind: str) -> CorpusSpec:
    return CorpusSpec(
        kind=kind,
        length=args.length,
        alphabet=args.alphabet,
        period=args.period,
        seed=args.seed,
        path=args.text if kind == "english-sample-file" else None,
    )


def _open_input(stack: ExitStack, path: Path | None) -> BinaryIO:
    if path is None:
        return sys.stdin.buffer
    return stack.enter_context(path.open("rb"))


def _open_output(stack: ExitStack, path: Path | None) -> BinaryIO:
    """Open the output file; it is removed again if the command fails."""
    if path is None:
        return sys.stdout.buffer
    stream = path.open("wb")

    def close(exc_type: type[BaseException] | None, *_: object) -> None:
        stream.close()
        if exc_type is not None:
            path.unlink(missing_ok=True)

    stack.push(close)
    return stream


def _dispatch(args: argparse.Namespace) -> int:
    with ExitStack() as stack:
        if args.mode == "compress":
            config = _run_config(args)
            record = run_compress(
                config,
                _open_input(stack, args.input),
                _open_output(stack, args.output),
                args.input.name if args.input else "stdin",
            )
            if config.stats is not None:
                write_stats(records_to_dataset([record]), config.stats)

        elif args.mode == "decompress":
            run_decompress(_open_input(stack, args.input), _open_output(stack, args.output))

        elif args.mode == "verify":
            config = _run_config(args)
            record = run_verify(
                config, _open_input(stack, args.input), args.input.name if args.input else "stdin"
            )
            print(f"verified: n={record.n} z={record.z}")
            if config.stats is not None:
                write_stats(records_to_dataset([record]), config.stats)

        elif args.mode == "bench":
            specs = [_corpus_spec(args, kind) for kind in args.kinds or ["english-sample-file"]]
            dataset = run_bench(
                args.backends or BACKENDS, specs, args.formats or ["lz78"], seed=args.seed
            )
            write_stats(dataset, args.stats if args.stats is not None else sys.stdout)

        elif args.mode == "corpus":
            data = generate_corpus(_corpus_spec(args, args.kind))
            _open_output(stack, args.output).write(data)

    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(
            level=logging.DEBUG if args.verbose > 1 else logging.INFO,
            stream=sys.stderr,
            format="%(name)s: %(message)s",
        )

    try:
        return _dispatch(args)
    except (UsageError, ValidationError) as err:
        message, status = str(err), EXIT_USAGE
    except CollisionDetected as err:
        message, status = str(err), EXIT_COLLISION
    except CoderError as err:
        message, status = str(err), EXIT_CORRUPT
    except OSError as err:
        message, status = str(err), EXIT_IO
    except ValueError as err:
        message, status = str(err), EXIT_USAGE
    print(f"lztrie: error: {message}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
