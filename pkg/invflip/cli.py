import logging.config
from pathlib import Path
from typing import Annotated

import typer
from pydantic import ValidationError

from .attack.models import PayloadTerm, SynthMode
from .attack.schemas import PlanOut
from .attack.services import synthesize
from .config import get_settings
from .errors import InvflipError
from .harness.schemas import ReportOut
from .harness.services import compare_traces, run_scenario, stage
from .invariants.schemas import SpecDump
from .logging_config import build_logging_config
from .sim.models import ScenarioMode
from .sim.schemas import PlantConfig, read_trace_csv
from .st.emitter import emit_program
from .st.models import Role
from .st.parser import load_program
from .st.schemas import ProgramOut

app = typer.Typer(
    help="Synthesize and simulate invariant-flipping payloads for PLC programs.",
    no_args_is_help=True,
    add_completion=False,
)

SafetyOpt = Annotated[Path, typer.Option("--safety", help="Safety program (.st)")]
ControlOpt = Annotated[
    Path | None, typer.Option("--control", help="Control program (.st)")
]
OutOpt = Annotated[Path, typer.Option("--out", help="Output directory")]
PaperLiteralOpt = Annotated[
    bool,
    typer.Option("--paper-literal", help="Use the printed forced-output table"),
]
PlantOpt = Annotated[
    Path | None, typer.Option("--plant", help="Plant configuration JSON")
]


def _fail(e: InvflipError) -> typer.Exit:
    typer.echo(f"error: {e}", err=True)
    return typer.Exit(code=1)


@app.callback()
def main() -> None:
    try:
        settings = get_settings()
    except ValidationError as e:
        typer.echo(f"invalid configuration: {e}", err=True)
        raise typer.Exit(code=2) from None
    logging.config.dictConfig(build_logging_config(settings))


@app.command()
def parse(
    path: Annotated[Path, typer.Argument(help="Structured-text program")],
    as_json: Annotated[
        bool, typer.Option("--json/--st", help="AST JSON or canonical ST")
    ] = True,
    role: Annotated[Role, typer.Option("--role")] = Role.SAFETY,
) -> None:
    """Parse a program and print its AST as JSON, or its canonical text."""
    try:
        with stage("parse"):
            program = load_program(path, role)
    except InvflipError as e:
        raise _fail(e) from None
    if as_json:
        typer.echo(ProgramOut.from_program(program).model_dump_json(indent=2))
    else:
        typer.echo(emit_program(program), nl=False)


@app.command()
def inspect(safety: SafetyOpt, control: ControlOpt = None) -> None:
    """Print the extracted invariants, controllers and atom bindings."""
    try:
        with stage("parse"):
            safety_program = load_program(safety, Role.SAFETY)
            control_program = (
                load_program(control, Role.CONTROL) if control is not None else None
            )
        with stage("extract"):
            dump = SpecDump.from_programs(safety_program, control_program)
    except InvflipError as e:
        raise _fail(e) from None
    typer.echo(dump.model_dump_json(indent=2))


@app.command()
def synth(
    safety: SafetyOpt,
    control: ControlOpt = None,
    out: OutOpt = Path("build"),
    paper_literal: PaperLiteralOpt = False,
    term: Annotated[
        PayloadTerm, typer.Option("--term", help="Which payload is written as F_ms")
    ] = PayloadTerm.BOTH,
) -> None:
    """Write F_ms.st, F_mc.st and plan.json for a safety/control program pair."""
    mode = SynthMode.PAPER_LITERAL if paper_literal else SynthMode.SIGN_CONSISTENT
    try:
        with stage("parse"):
            safety_program = load_program(safety, Role.SAFETY)
            control_program = (
                load_program(control, Role.CONTROL) if control is not None else None
            )
        with stage("synth"):
            artifacts = synthesize(safety_program, control_program, mode, term)
        with stage("report"):
            out.mkdir(parents=True, exist_ok=True)
            written = {
                "F_ms.st": emit_program(artifacts.f_ms),
                "F_mc.st": emit_program(artifacts.f_mc),
                "plan.json": PlanOut.from_plan(artifacts.plan).model_dump_json(
                    indent=2
                )
                + "\n",
            }
            for name, body in written.items():
                (out / name).write_text(body, encoding="utf-8")
    except InvflipError as e:
        raise _fail(e) from None
    for warning in artifacts.plan.warnings:
        typer.echo(f"warning: {warning}", err=True)
    for name in written:
        typer.echo(str(out / name))


@app.command()
def simulate(
    safety: SafetyOpt,
    control: ControlOpt = None,
    scenario: Annotated[
        ScenarioMode, typer.Option("--scenario", help="Scenario to run")
    ] = ScenarioMode.BASELINE,
    plant: PlantOpt = None,
    duration: Annotated[
        float | None, typer.Option("--duration", min=0.0, help="Seconds")
    ] = None,
    dt: Annotated[float | None, typer.Option("--dt", help="Scan step, s")] = None,
    seed: Annotated[int | None, typer.Option("--seed", help="Noise seed")] = None,
    noise: Annotated[
        float, typer.Option("--noise", min=0.0, help="Sensor noise amplitude")
    ] = 0.0,
    out: OutOpt = Path("build"),
    paper_literal: PaperLiteralOpt = False,
) -> None:
    """Run a scenario next to its baseline and write traces plus report.json."""
    try:
        with stage("parse"):
            plant_config = PlantConfig.load(plant) if plant is not None else None
        result = run_scenario(
            scenario,
            safety,
            control,
            plant_config=plant_config,
            duration=duration,
            dt=dt,
            out_dir=out,
            paper_literal=paper_literal,
            noise=noise,
            seed=seed,
        )
        with stage("report"):
            body = ReportOut.from_report(result).model_dump_json(indent=2)
            (out / "report.json").write_text(body + "\n", encoding="utf-8")
    except InvflipError as e:
        raise _fail(e) from None
    typer.echo(body)


@app.command()
def report(
    baseline: Annotated[Path, typer.Argument(help="Baseline trace CSV")],
    attacked: Annotated[Path, typer.Argument(help="Attacked trace CSV")],
    plant: PlantOpt = None,
    scenario: Annotated[
        ScenarioMode, typer.Option("--scenario", help="Mode of the attacked run")
    ] = ScenarioMode.HAZARD,
) -> None:
    """Compare two trace CSVs and print the impact report."""
    try:
        with stage("report"):
            q_out = PlantConfig.load(plant).q_out if plant is not None else 1.0
            result = compare_traces(
                read_trace_csv(baseline, ScenarioMode.BASELINE, q_out),
                read_trace_csv(attacked, scenario, q_out),
                scenario,
            )
    except InvflipError as e:
        raise _fail(e) from None
    typer.echo(ReportOut.from_report(result).model_dump_json(indent=2))


if __name__ == "__main__":
    app()
