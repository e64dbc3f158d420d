import json
import logging
from pathlib import Path
from typing import List

from pydantic import ValidationError

from .errors import ArtifactIOError, DatasetError, MissingArtifactError
from .models import PredictionRecord, PseudoPair, QASample, RunReport, TaskKind
from .utils import iter_jsonl, write_jsonl

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
PREDICTIONS_FILE = "predictions.jsonl"


def load_dataset(path, kind: TaskKind) -> List[QASample]:
    """Load and validate a JSONL QA dataset, preserving file order.

    Lines without an ``id`` get their zero-padded line index so predictions can be
    joined back to samples.
    """
    dataset_path = Path(path)
    if not dataset_path.is_file():
        raise MissingArtifactError(dataset_path, "dataset")

    samples = []
    for line_num, line in iter_jsonl(dataset_path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise DatasetError(dataset_path, line_num, f"invalid JSON: {e.msg}") from e
        if not isinstance(record, dict):
            raise DatasetError(dataset_path, line_num, "expected a JSON object")
        try:
            samples.append(QASample.from_record(record, kind, fallback_id=f"{line_num - 1:06d}"))
        except ValidationError as e:
            raise DatasetError(dataset_path, line_num, _first_error(e)) from e

    logger.info(f"Loaded {len(samples)} {kind.value} samples from {dataset_path}")
    return samples


def save_pseudo_data(pairs: List[PseudoPair], path) -> None:
    pseudo_path = Path(path)
    try:
        write_jsonl(pseudo_path, (pair.model_dump_json() for pair in pairs))
    except OSError as e:
        raise ArtifactIOError(pseudo_path, f"cannot write pseudo data: {e}") from e
    logger.info(f"Saved {len(pairs)} pseudo pairs to {pseudo_path}")


def load_pseudo_data(path) -> List[PseudoPair]:
    pseudo_path = Path(path)
    if not pseudo_path.is_file():
        raise MissingArtifactError(pseudo_path, "pseudo data")

    pairs = []
    try:
        for line_num, line in iter_jsonl(pseudo_path):
            try:
                pairs.append(PseudoPair.model_validate_json(line))
            except ValidationError as e:
                raise DatasetError(pseudo_path, line_num, _first_error(e)) from e
    except OSError as e:
        raise ArtifactIOError(pseudo_path, f"cannot read pseudo data: {e}") from e
    return pairs


def save_predictions(records: List[PredictionRecord], path) -> None:
    predictions_path = Path(path)
    try:
        write_jsonl(predictions_path, (record.to_json_line() for record in records))
    except OSError as e:
        raise ArtifactIOError(predictions_path, f"cannot write predictions: {e}") from e


def load_predictions(path) -> List[PredictionRecord]:
    predictions_path = Path(path)
    if not predictions_path.is_file():
        raise MissingArtifactError(predictions_path, "predictions")
    return [PredictionRecord.model_validate_json(line) for _, line in iter_jsonl(predictions_path)]


def save_run(report: RunReport, out_dir) -> Path:
    """Persist report.json and predictions.jsonl side by side"""
    run_dir = Path(out_dir)
    try:
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / REPORT_FILE).write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(run_dir, f"cannot write run report: {e}") from e
    save_predictions(report.records, run_dir / PREDICTIONS_FILE)
    logger.info(f"Saved {report.label} report to {run_dir}")
    return run_dir


def load_run(run_dir) -> RunReport:
    run_path = Path(run_dir)
    report_path = run_path / REPORT_FILE
    if not report_path.is_file():
        raise MissingArtifactError(report_path, "run report")
    report = RunReport.model_validate_json(report_path.read_text(encoding="utf-8"))
    predictions_path = run_path / PREDICTIONS_FILE
    if predictions_path.is_file():
        report.records = load_predictions(predictions_path)
    return report


def _first_error(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]
