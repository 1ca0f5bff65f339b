"""Service for assembling and persisting experiment reports."""

import json
import logging
import os
from typing import Any, Dict, Optional

from src.core import __version__

logger = logging.getLogger(__name__)

TOOL_NAME = "pa-random-join-lab"


class ReportService:
    """Service class for building report envelopes and writing them to disk."""

    def __init__(self, output_dir: str = "reports"):
        """
        Initialize the report service.

        Args:
            output_dir: Directory for reports written without an explicit path
        """
        self.output_dir: str = output_dir

    def build_report(
        self, command: str, config: Dict[str, Any], result: Dict[str, Any]
    ) -> Dict[str, Any]:
        """
        Wrap a result with everything needed to regenerate it.

        Args:
            command: Subcommand that produced the result
            config: Canonical configuration of the run
            result: Command result

        Returns:
            Report dictionary (no timestamps, so equal runs give equal bytes)
        """
        return {
            "tool": TOOL_NAME,
            "version": __version__,
            "command": command,
            "config": config,
            "result": result,
        }

    def render(self, report: Dict[str, Any]) -> str:
        """Canonical JSON text of a report."""
        return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def default_path(self, command: str) -> str:
        return os.path.join(self.output_dir, f"{command}.json")

    def write(self, report: Dict[str, Any], path: Optional[str] = None) -> str:
        """
        Write a report as JSON.

        Args:
            report: Report built by build_report
            path: Target file (default: <output_dir>/<command>.json)

        Returns:
            The path written
        """
        path = path or self.default_path(report["command"])
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.render(report))
        logger.info(f"Saved {report['command']} report to {path}")
        return path

    def load(self, path: str) -> Dict[str, Any]:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
