"""HTTP service exposing the reasoner: parse, compute, check, diff, generate, bench.

Requests carry theory source text (the service never touches client files).
Parse failures return 422 with the full error list; everything else is a
plain JSON body mirroring the library's report types.
"""

from __future__ import annotations

from typing import Literal as TypingLiteral, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .analyzer import diff_extensions, generate_sized_theory, scaling_benchmark
from .core import Mode, Theory, check_consistency, theory_size
from .linengine import compute_extension_linear
from .refengine import Extension, compute_extension_reference
from .textio import extension_to_dict, parse_theory_collect, render_theory

app = FastAPI(title="outcomedl", version=__version__)

_ENGINES = {
    "linear": compute_extension_linear,
    "reference": compute_extension_reference,
}


class ComputeRequest(BaseModel):
    source: str
    engine: TypingLiteral["linear", "reference"] = "linear"
    modes: Optional[list[str]] = None


class ModePartition(BaseModel):
    plus: list[str]
    minus: list[str]
    undecided: list[str]


class ComputeResponse(BaseModel):
    modes: dict[str, ModePartition]
    warnings: list[str] = Field(default_factory=list)


class CheckRequest(BaseModel):
    source: str


class CheckResponse(BaseModel):
    consistent: bool
    violations: list[str] = Field(default_factory=list)


class DiffRequest(BaseModel):
    source: str


class DiffResponse(BaseModel):
    equivalent: bool
    differences: dict[str, dict[str, list[str]]] = Field(default_factory=dict)


class GenerateRequest(BaseModel):
    size: int = Field(gt=0, le=2_000_000)
    seed: int = 0


class GenerateResponse(BaseModel):
    source: str
    size: int


class BenchRequest(BaseModel):
    sizes: list[int]
    seed: int = 0
    engine: TypingLiteral["linear", "reference"] = "linear"
    repeats: int = Field(default=5, ge=1, le=20)


class BenchPoint(BaseModel):
    size: int
    seconds: float


class BenchResponse(BaseModel):
    points: list[BenchPoint]
    slope: float
    threshold: float
    within_bound: bool


def _parse_or_422(source: str) -> tuple[Theory, list[str]]:
    theory, errors, warns = parse_theory_collect(source)
    if theory is None:
        raise HTTPException(
            status_code=422,
            detail=[
                {"line": e.line, "column": e.column, "message": e.message, "snippet": e.snippet}
                for e in errors
            ],
        )
    return theory, warns


def _mode_filter(ext: Extension, modes: Optional[list[str]]) -> dict[str, ModePartition]:
    wanted = set(modes) if modes else {m.value for m in Mode}
    unknown = wanted - {m.value for m in Mode}
    if unknown:
        raise HTTPException(status_code=422, detail=f"unknown modes: {sorted(unknown)}")
    data = extension_to_dict(ext)["modes"]
    return {k: ModePartition(**v) for k, v in data.items() if k in wanted}


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/compute", response_model=ComputeResponse)
def compute(req: ComputeRequest) -> ComputeResponse:
    theory, warns = _parse_or_422(req.source)
    report = check_consistency(theory)
    if not report.ok:
        warns = warns + [f"inconsistent theory: {v}" for v in report.violations]
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("ignore")
        ext = _ENGINES[req.engine](theory)
    return ComputeResponse(modes=_mode_filter(ext, req.modes), warnings=warns)


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    theory, _ = _parse_or_422(req.source)
    report = check_consistency(theory)
    return CheckResponse(consistent=report.ok, violations=[str(v) for v in report.violations])


@app.post("/diff", response_model=DiffResponse)
def diff(req: DiffRequest) -> DiffResponse:
    theory, _ = _parse_or_422(req.source)
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("ignore")
        report = diff_extensions(
            compute_extension_reference(theory), compute_extension_linear(theory)
        )
    return DiffResponse(equivalent=report.equivalent, differences=report.to_dict())


@app.post("/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest) -> GenerateResponse:
    theory = generate_sized_theory(req.size, req.seed)
    return GenerateResponse(source=render_theory(theory), size=theory_size(theory))


@app.post("/bench", response_model=BenchResponse)
def bench(req: BenchRequest) -> BenchResponse:
    try:
        report = scaling_benchmark(
            req.sizes, seed=req.seed, engine=_ENGINES[req.engine], repeats=req.repeats
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return BenchResponse(
        points=[BenchPoint(size=p.size, seconds=p.seconds) for p in report.points],
        slope=report.slope,
        threshold=report.threshold,
        within_bound=report.within_bound,
    )
