"""
Training history tracking.

Records one row per evaluation point:
- Iteration, train objective and data loss
- The lambda in effect (it ramps during warm-up)
- Held-out metric, if an eval set was given
- Per-layer count of deterministic gates > 0 (inputs passed on to the next hidden layer)

The history is kept in memory during training and written as CSV afterwards.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from storage.files import PathLike, atomic_write_text
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)


class TrainHistory:
    """
    In-memory per-eval record of a training run.

    Iterations must be strictly increasing.
    """

    def __init__(self, metric_kind: Optional[str] = None):
        self.metric_kind = metric_kind
        self.records: List[Dict[str, Any]] = []
        self.duration_s: float = 0.0

    def __len__(self) -> int:
        return len(self.records)

    def track(
        self,
        iteration: int,
        objective: float,
        data_loss: float,
        lam: float,
        open_gates: Sequence[int],
        metric: Optional[float] = None,
    ) -> Dict[str, Any]:
        """Append one evaluation record."""
        if self.records and iteration <= self.records[-1]["iteration"]:
            raise ArgumentError(
                f"history iterations must increase: {iteration} after {self.records[-1]['iteration']}"
            )
        record = {
            "iteration": int(iteration),
            "objective": float(objective),
            "data_loss": float(data_loss),
            "lambda": float(lam),
            "metric": None if metric is None else float(metric),
            "open_gates": [int(c) for c in open_gates],
        }
        self.records.append(record)
        return record

    def track_duration(self, seconds: float):
        self.duration_s = float(seconds)

    @property
    def iterations(self) -> List[int]:
        return [r["iteration"] for r in self.records]

    def to_frame(self) -> pd.DataFrame:
        """One row per record, open-gate counts spread over open_gates_k columns."""
        rows = []
        for r in self.records:
            row = {k: v for k, v in r.items() if k != "open_gates"}
            for k, count in enumerate(r["open_gates"], start=1):
                row[f"open_gates_{k}"] = count
            rows.append(row)
        frame = pd.DataFrame(rows)
        if self.metric_kind and not frame.empty:
            frame = frame.rename(columns={"metric": self.metric_kind})
        return frame

    def write_csv(self, path: PathLike):
        atomic_write_text(path, self.to_frame().to_csv(index=False, float_format="%.17g"))
        logger.info(f"Wrote training history ({len(self)} records) to {path}")

    @classmethod
    def from_csv(cls, path: PathLike) -> "TrainHistory":
        frame = pd.read_csv(path, float_precision="round_trip")
        known = {"iteration", "objective", "data_loss", "lambda"}
        gate_columns = sorted(
            (c for c in frame.columns if c.startswith("open_gates_")),
            key=lambda c: int(c.rsplit("_", 1)[1]),
        )
        metric_columns = [c for c in frame.columns if c not in known and c not in gate_columns]
        history = cls(metric_kind=metric_columns[0] if metric_columns else None)
        for _, row in frame.iterrows():
            metric = row[metric_columns[0]] if metric_columns else None
            history.track(
                iteration=int(row["iteration"]),
                objective=row["objective"],
                data_loss=row["data_loss"],
                lam=row["lambda"],
                open_gates=[row[c] for c in gate_columns],
                metric=None if metric is None or pd.isna(metric) else metric,
            )
        return history

    def get_summary(self) -> Dict[str, Any]:
        """
        Get a summary of the run.

        Returns:
            Dictionary with first/last objective, best metric and final gate counts
        """
        if not self.records:
            return {"evaluations": 0}
        first, last = self.records[0], self.records[-1]
        metrics = [r["metric"] for r in self.records if r["metric"] is not None]
        summary: Dict[str, Any] = {
            "evaluations": len(self.records),
            "last_iteration": last["iteration"],
            "first_objective": first["objective"],
            "final_objective": last["objective"],
            "final_data_loss": last["data_loss"],
            "final_open_gates": last["open_gates"],
            "duration_s": round(self.duration_s, 2),
        }
        if metrics:
            summary["final_metric"] = metrics[-1]
            summary["metric_kind"] = self.metric_kind
        return summary

    def log_summary(self):
        """Log a human-readable summary at INFO level."""
        summary = self.get_summary()
        if not summary["evaluations"]:
            logger.info("Training history is empty")
            return
        logger.info(
            f"Training finished after {summary['last_iteration']} iterations "
            f"({summary['evaluations']} evaluations, {summary['duration_s']}s)"
        )
        logger.info(
            f"Objective {summary['first_objective']:.6f} -> {summary['final_objective']:.6f} "
            f"(data loss {summary['final_data_loss']:.6f})"
        )
        if "final_metric" in summary:
            logger.info(f"Held-out {summary['metric_kind']}: {summary['final_metric']:.4f}")
        logger.info(f"Open gates per layer: {summary['final_open_gates']}")
