"""Plans and executes the blinded evaluation grid.

One job per (case, role, model) cell, optionally repeated.  Jobs run
concurrently up to a limit, persist their records incrementally through
a single writer, and never unblind anything: records are keyed by public
label only.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .blinding import BlindPlan
from .corpus import Corpus
from .errors import HarnessError, ValidationError
from .parse import parse_evaluation
from .persona import QuestionnaireTemplate, ReaderRole, render_evaluation_prompt
from .provider import ProviderConfig, TranscriptStore, complete

STATUS_PENDING = "pending"
STATUS_RUNNING = "running"
STATUS_DONE = "done"
STATUS_FAILED = "failed"


@dataclass
class EvaluationJob:
    case_id: str
    role_id: str
    model_id: str
    repeat_index: int = 0
    status: str = STATUS_PENDING
    failure: str = ""

    def key(self) -> str:
        base = f"{self.case_id}_{self.role_id}_{self.model_id}"
        return base if self.repeat_index == 0 else f"{base}_r{self.repeat_index}"

    def sort_key(self):
        return (self.case_id, self.role_id, self.model_id, self.repeat_index)


@dataclass(frozen=True)
class EvaluationRecord:
    case_id: str
    role_id: str
    model_id: str
    repeat_index: int
    raw_response: str
    scores: dict[int, dict[str, int]]
    interview: dict[str, str]
    parse_mode: str               # fenced | prose_fallback | manual
    complete: bool
    warnings: tuple[str, ...]
    call_id: str

    def key(self) -> str:
        base = f"{self.case_id}_{self.role_id}_{self.model_id}"
        return base if self.repeat_index == 0 else f"{base}_r{self.repeat_index}"

    def sort_key(self):
        return (self.case_id, self.role_id, self.model_id, self.repeat_index)


def plan_grid(
    corpus: Corpus,
    roles: list[str],
    models: list[str],
    plans: dict[str, BlindPlan],
    repeats: int = 1,
) -> list[EvaluationJob]:
    """Full grid, deterministically ordered by (case, role, model)."""
    if repeats < 1:
        raise ValidationError("repeats must be >= 1")
    for case in corpus:
        if case.id not in plans:
            raise ValidationError(f"case {case.id!r} has no blind plan; run blinding first")
    jobs = []
    for case in corpus:
        for role in sorted(roles):
            for model in sorted(models):
                for rep in range(repeats):
                    jobs.append(EvaluationJob(case.id, role, model, repeat_index=rep))
    jobs.sort(key=EvaluationJob.sort_key)
    return jobs


@dataclass
class JudgeContext:
    corpus: Corpus
    plans: dict[str, BlindPlan]
    roles: dict[str, ReaderRole]
    template: QuestionnaireTemplate
    providers: dict[str, ProviderConfig]
    records_dir: Path
    transcripts: TranscriptStore | None = None
    transports: dict[str, object] = field(default_factory=dict)  # model_id -> transport

    def transport_for(self, model_id: str):
        return self.transports.get(model_id)


class RecordStore:
    """Single-writer persistence for evaluation records."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def path_for(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def exists(self, key: str) -> bool:
        return self.path_for(key).exists()

    def save(self, record: EvaluationRecord) -> Path:
        doc = {
            "case_id": record.case_id,
            "role_id": record.role_id,
            "model_id": record.model_id,
            "repeat_index": record.repeat_index,
            "raw_response": record.raw_response,
            "scores": {str(label): dict(sorted(d.items())) for label, d in sorted(record.scores.items())},
            "interview": dict(sorted(record.interview.items())),
            "parse_mode": record.parse_mode,
            "complete": record.complete,
            "warnings": list(record.warnings),
            "call_id": record.call_id,
        }
        path = self.path_for(record.key())
        with self._lock:
            path.write_text(json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
        return path

    def load(self, key: str) -> EvaluationRecord:
        raw = json.loads(self.path_for(key).read_text(encoding="utf-8"))
        return record_from_doc(raw)

    def load_all(self) -> list[EvaluationRecord]:
        records = []
        for path in sorted(self.directory.glob("*.json")):
            records.append(record_from_doc(json.loads(path.read_text(encoding="utf-8"))))
        records.sort(key=EvaluationRecord.sort_key)
        return records


def record_from_doc(raw: dict) -> EvaluationRecord:
    return EvaluationRecord(
        case_id=raw["case_id"],
        role_id=raw["role_id"],
        model_id=raw["model_id"],
        repeat_index=raw["repeat_index"],
        raw_response=raw["raw_response"],
        scores={int(label): {d: int(v) for d, v in per.items()}
                for label, per in raw["scores"].items()},
        interview=dict(raw["interview"]),
        parse_mode=raw["parse_mode"],
        complete=raw["complete"],
        warnings=tuple(raw["warnings"]),
        call_id=raw["call_id"],
    )


def execute_job(job: EvaluationJob, ctx: JudgeContext) -> EvaluationRecord:
    case = ctx.corpus.get(job.case_id)
    plan = ctx.plans[job.case_id]
    role = ctx.roles[job.role_id]
    config = ctx.providers[job.model_id]
    prompt = render_evaluation_prompt(role, case, plan, ctx.template)
    response, transcript = complete(
        config, prompt.messages(),
        transport=ctx.transport_for(job.model_id),
        store=ctx.transcripts)
    parsed, mode = parse_evaluation(response, plan.k)
    return EvaluationRecord(
        case_id=job.case_id,
        role_id=job.role_id,
        model_id=job.model_id,
        repeat_index=job.repeat_index,
        raw_response=response,
        scores=parsed.scores,
        interview=parsed.blocks,
        parse_mode=mode,
        complete=parsed.is_complete(plan.k),
        warnings=tuple(parsed.warnings),
        call_id=transcript.call_id,
    )


def run_grid(
    jobs: list[EvaluationJob],
    ctx: JudgeContext,
    concurrency_limit: int = 1,
    resume: bool = False,
) -> list[EvaluationRecord]:
    """Execute every pending job; failures never abort siblings.

    Each job runs at most once.  With ``resume``, jobs whose record file
    already exists are loaded instead of re-executed.  The returned
    collection is sorted by (case, role, model, repeat) regardless of
    completion order; job statuses mirror what happened.
    """
    if concurrency_limit < 1:
        raise ValidationError("concurrency limit must be >= 1")
    store = RecordStore(ctx.records_dir)
    records: dict[str, EvaluationRecord] = {}

    to_run = []
    for job in jobs:
        if resume and store.exists(job.key()):
            records[job.key()] = store.load(job.key())
            job.status = STATUS_DONE
        else:
            to_run.append(job)

    results_lock = threading.Lock()

    def worker(job: EvaluationJob):
        job.status = STATUS_RUNNING
        try:
            record = execute_job(job, ctx)
        except HarnessError as exc:
            job.status = STATUS_FAILED
            job.failure = f"{type(exc).__name__}: {exc}"
            return
        store.save(record)
        with results_lock:
            records[job.key()] = record
        job.status = STATUS_DONE

    if to_run:
        with ThreadPoolExecutor(max_workers=concurrency_limit) as pool:
            list(pool.map(worker, to_run))

    return sorted(records.values(), key=EvaluationRecord.sort_key)
