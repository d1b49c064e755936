from __future__ import annotations

import os
import tempfile
from pathlib import Path

import logfire
import typer
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from qdbsearch.circuit import gate_stats
from qdbsearch.errors import InputError, InvariantViolation, QdbSearchError, VerificationFailed
from qdbsearch.grover import SearchOptions, build_grover_circuit, iteration_count, run_search
from qdbsearch.oracle import build_double_query
from qdbsearch.qasm import export_qasm
from qdbsearch.qmem import Database, QubitLayout, build_load_circuit, format_bits, load_database, parse_bits
from qdbsearch.verify import VerificationResult, sweep_small, verify_database

try:  # typer >= 0.26 ships its own click
    from typer._click.exceptions import UsageError
except ImportError:
    from click.exceptions import UsageError

console = Console()

# Console-only by default; user can configure a token later.
logfire.configure(send_to_logfire=False)

app = typer.Typer(add_completion=False, no_args_is_help=True, help="qdbsearch: Grover search of a real database.")

EXIT_INPUT = 1
EXIT_INVARIANT = 2


def _fail(message: str, code: int = EXIT_INPUT) -> typer.Exit:
    console.print(Panel.fit(escape(message), title="qdbsearch", style="red"))
    return typer.Exit(code=code)


def _exit_for(exc: QdbSearchError) -> typer.Exit:
    code = EXIT_INVARIANT if isinstance(exc, InvariantViolation) else EXIT_INPUT
    return _fail(f"{type(exc).__name__}: {exc}", code)


def _resolve(path: Path) -> Path:
    return path if path.is_absolute() else Path.cwd() / path


def _read_db(db: Path | None) -> Database:
    if db is None:
        raise _fail("Missing option --db FILE")
    db_path = _resolve(db)
    if not db_path.exists():
        raise _fail(f"File not found: {db_path}")
    return load_database(db_path)


def _read_target(target: str | None, database: Database) -> int:
    if target is None:
        raise _fail("Missing option --target BITS")
    return parse_bits(target, database.m)


def _read_iterations(iterations: str) -> str | int:
    if iterations == "auto":
        return "auto"
    try:
        value = int(iterations)
    except ValueError:
        raise _fail(f"--iterations must be 'auto' or a non-negative integer, got {iterations!r}") from None
    if value < 0:
        raise _fail(f"--iterations must be non-negative, got {value}")
    return value


def _write_atomic(path: Path, text: str) -> Path:
    """Write via a sibling temporary file so a failure never leaves a partial output."""
    path = _resolve(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


class ResourceReport(BaseModel):
    n: int
    m: int
    qubit_count: int
    load_gates: int
    load_max_arity: int
    arity_bound: int
    query_gates: int
    iterations: int
    total_gates: int
    max_arity: int


DbOption = typer.Option(None, "--db", help="Database file: 'n m' header then 2^n MSB-left records")
TargetOption = typer.Option(None, "--target", help="Record to search for, MSB-left bits")
IterationsOption = typer.Option("auto", "--iterations", help="'auto' or an explicit Grover iteration count")


@app.command("run")
def run_command(
    db: Path | None = DbOption,
    target: str | None = TargetOption,
    iterations: str = IterationsOption,
    shots: int = typer.Option(1024, "--shots", min=0, help="Measurement shots on the address register"),
    seed: int = typer.Option(0, "--seed", min=0, max=2**64 - 1, help="Sampling seed"),
    fold: bool = typer.Option(False, "--fold", help="Fold the s register and the one-wire into classical bits"),
    restore: bool = typer.Option(
        True, "--restore/--no-restore", help="Use the restoring double query (disable to see why it is needed)"
    ),
    out: Path | None = typer.Option(None, "--out", help="Write the JSON run report here"),
) -> None:
    """Run Grover search for --target over the database."""
    with logfire.span("qdbsearch.cli.run", db=str(db), target=target, fold=fold, restore=restore):
        try:
            database = _read_db(db)
            s = _read_target(target, database)
            options = SearchOptions(
                iterations=_read_iterations(iterations), shots=shots, seed=seed, fold=fold, restore=restore
            )
            with console.status("Simulating Grover search…", spinner="dots"):
                report = run_search(database, s, options)
        except QdbSearchError as exc:
            raise _exit_for(exc) from None
        except ValidationError as exc:
            raise _fail(str(exc)) from None

        summary = [
            f"Database: n={report.n} m={report.m} (N={1 << report.n}), target s={report.target}",
            f"Solutions M={report.multiplicity}, iterations r={report.iterations}, oracle queries={report.query_count}",
            f"Simulated qubits: {report.qubit_count} (folded away: {report.folded_qubits})",
            f"Success probability: {report.success_probability:.9f}",
            f"Reported address: {report.reported_address}  found={report.found}",
            f"Wall time: {report.wall_time_s:.3f}s",
        ]
        style = "green" if report.found else "yellow"
        console.print(Panel.fit("\n".join(summary), title="qdbsearch run", style=style))

        table = Table(title="Success probability per iteration")
        table.add_column("Iteration", justify="right")
        table.add_column("P(success)", justify="right")
        table.add_column("P(data=0)", justify="right")
        restored = [1.0, *report.data_restored]
        for index, probability in enumerate(report.success_probabilities):
            table.add_row(str(index), f"{probability:.9f}", f"{restored[index]:.9f}")
        console.print(table)

        if report.histogram:
            hist = Table(title=f"Address histogram ({report.shots} shots, seed {report.seed})")
            hist.add_column("Address", justify="right")
            hist.add_column("Bits")
            hist.add_column("Count", justify="right")
            ranked = sorted(report.histogram.items(), key=lambda item: (-item[1], item[0]))
            for address, count in ranked[:16]:
                hist.add_row(str(address), format_bits(address, report.n), str(count))
            console.print(hist)

        if out is not None:
            written = _write_atomic(out, report.model_dump_json(indent=2) + "\n")
            logfire.info("qdbsearch.cli.report_written", path=str(written))
            console.print(Panel.fit(f"Wrote {escape(str(written))}", title="qdbsearch", style="green"))


def _print_results(results: list[VerificationResult]) -> None:
    table = Table(title="Verification")
    table.add_column("Check")
    table.add_column("Worst error", justify="right")
    table.add_column("Pass", justify="center")
    for result in results:
        table.add_row(result.check, f"{result.error:.3e}", "yes" if result.passed else "NO")
    console.print(table)


@app.command("verify")
def verify_command(
    db: Path | None = DbOption,
    target: str | None = TargetOption,
    sweep: str | None = typer.Option(None, "--sweep", help="Built-in sweep instead of --db ('small')"),
    seed: int = typer.Option(0, "--seed", min=0, help="Seed for the random part of a sweep"),
    corrupt: bool = typer.Option(False, "--corrupt", hidden=True),
) -> None:
    """Check LOAD involution, unitarity, restore and oracle equivalence."""
    with logfire.span("qdbsearch.cli.verify", db=str(db), sweep=sweep, corrupt=corrupt):
        try:
            if sweep is not None:
                if sweep != "small":
                    raise _fail(f"--sweep supports only 'small', got {sweep!r}")
                cases = list(sweep_small(seed))
            else:
                database = _read_db(db)
                cases = [(database, _read_target(target, database))]

            results: list[VerificationResult] = []
            with console.status(f"Verifying {len(cases)} case(s)…", spinner="dots"):
                for database, s in cases:
                    results.extend(verify_database(database, s, QubitLayout.for_database(database), corrupt=corrupt))
        except QdbSearchError as exc:
            raise _exit_for(exc) from None

        worst: dict[str, VerificationResult] = {}
        for result in results:
            if result.check not in worst or result.error > worst[result.check].error:
                worst[result.check] = result
        _print_results(list(worst.values()))

        failed = [r for r in results if not r.passed]
        if failed:
            offender = max(failed, key=lambda r: r.error)
            error = VerificationFailed(f"{offender.check} error {offender.error:.3e} for {offender.worst_case}")
            raise _exit_for(error)
        message = f"All {len(results)} checks passed over {len(cases)} case(s)"
        console.print(Panel.fit(message, title="qdbsearch", style="green"))


@app.command("export")
def export_command(
    db: Path | None = DbOption,
    target: str | None = TargetOption,
    iterations: str = IterationsOption,
    fmt: str = typer.Option("qasm3", "--format", help="Output format (only 'qasm3')"),
    out: Path | None = typer.Option(None, "--out", help="Output file (default: output/<db>.qasm)"),
) -> None:
    """Export the full Grover circuit (initialization + iterations) as OpenQASM 3."""
    with logfire.span("qdbsearch.cli.export", db=str(db), target=target):
        if fmt != "qasm3":
            raise _fail(f"--format supports only 'qasm3', got {fmt!r}")
        try:
            database = _read_db(db)
            s = _read_target(target, database)
            schedule = _read_iterations(iterations)
            r = iteration_count(database.size, max(database.records.count(s), 1)) if schedule == "auto" else schedule
            assert isinstance(r, int)
            circuit = build_grover_circuit(database, s, QubitLayout.for_database(database), r)
        except QdbSearchError as exc:
            raise _exit_for(exc) from None

        assert db is not None
        out_path = out if out is not None else Path.cwd() / "output" / f"{db.stem}.qasm"
        written = _write_atomic(out_path, export_qasm(circuit))
        logfire.info("qdbsearch.cli.qasm_written", path=str(written), gates=len(circuit))
        summary = f"Wrote {escape(str(written))} ({len(circuit)} gates, r={r})"
        console.print(Panel.fit(summary, title="qdbsearch", style="green"))


@app.command("stats")
def stats_command(
    db: Path | None = DbOption,
    target: str | None = TargetOption,
    iterations: str = IterationsOption,
    out: Path | None = typer.Option(None, "--out", help="Write the statistics as JSON here"),
) -> None:
    """Report qubit count, memory size and gate arity of the oracle."""
    with logfire.span("qdbsearch.cli.stats", db=str(db)):
        try:
            database = _read_db(db)
            s = _read_target(target, database) if target is not None else 0
            layout = QubitLayout.for_database(database)
            schedule = _read_iterations(iterations)
            solutions = database.records.count(s) if target is not None else 1
            r = iteration_count(database.size, max(solutions, 1)) if schedule == "auto" else schedule
            assert isinstance(r, int)
            load = gate_stats(build_load_circuit(database, layout))
            query = gate_stats(build_double_query(database, s, layout).single_query)
            total = gate_stats(build_grover_circuit(database, s, layout, r))
        except QdbSearchError as exc:
            raise _exit_for(exc) from None

        stats = ResourceReport(
            n=database.n,
            m=database.m,
            qubit_count=layout.qubit_count,
            load_gates=load.total,
            load_max_arity=load.max_arity,
            arity_bound=database.n + database.m,
            query_gates=query.total,
            iterations=r,
            total_gates=total.total,
            max_arity=total.max_arity,
        )
        table = Table(title=f"Resources (n={database.n}, m={database.m})")
        table.add_column("Quantity")
        table.add_column("Value", justify="right")
        for key, value in stats.model_dump().items():
            table.add_row(key, str(value))
        console.print(table)

        if out is not None:
            written = _write_atomic(out, stats.model_dump_json(indent=2) + "\n")
            console.print(Panel.fit(f"Wrote {escape(str(written))}", title="qdbsearch", style="green"))


def run() -> None:
    """Console entry point; usage errors exit with code 1."""
    try:
        code = app(standalone_mode=False)
    except UsageError as exc:
        exc.show()
        raise SystemExit(EXIT_INPUT) from None
    except InputError as exc:
        console.print(Panel.fit(escape(str(exc)), title="qdbsearch", style="red"))
        raise SystemExit(EXIT_INPUT) from None
    raise SystemExit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    run()
