import os
import csv
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from utils.reporting import Report

logger = logging.getLogger(__name__)


class ReportStorage:
    """
    Flat-file storage for run reports.

    Each report is written as <command>-<digest prefix>.json; index.json maps
    digests to files, and runs.csv keeps one summary row per run.
    """

    HEADERS = ['Date', 'Command', 'Target', 'Digest', 'Pass', 'Fail', 'Skipped', 'Other', 'File']

    def __init__(self, report_dir: Optional[str] = None):
        """Initialize report storage."""
        self.report_dir = Path(report_dir or os.getenv('REPORT_DIR', './data/reports'))
        self.index_file = self.report_dir / 'index.json'
        self.csv_file = self.report_dir / 'runs.csv'

        self.report_dir.mkdir(parents=True, exist_ok=True)
        self._ensure_files_exist()

        logger.debug(f"Report storage at: {self.report_dir}")

    def _ensure_files_exist(self):
        if not self.csv_file.exists():
            with open(self.csv_file, 'w', newline='', encoding='utf-8') as f:
                csv.writer(f).writerow(self.HEADERS)
        if not self.index_file.exists():
            with open(self.index_file, 'w', encoding='utf-8') as f:
                json.dump({'index': {}}, f)

    def _load_index(self) -> Dict[str, Dict[str, Any]]:
        try:
            with open(self.index_file, 'r', encoding='utf-8') as f:
                return json.load(f).get('index', {})
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Could not read report index: {e}")
            return {}

    def _save_index(self, index: Dict[str, Dict[str, Any]]):
        with open(self.index_file, 'w', encoding='utf-8') as f:
            json.dump({'index': index, 'updated': datetime.now().isoformat()}, f, indent=2)

    def save(self, report: Report, path: Optional[str] = None) -> str:
        """
        Write a report and record it in the index and the run log.

        Args:
            report: The run report.
            path: Explicit output path; defaults to the report directory.

        Returns:
            Path of the written report.
        """
        data = report.to_dict()
        digest = data['digest']
        output = Path(path) if path else self.report_dir / f"{report.command}-{digest[:12]}.json"
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False)

        index = self._load_index()
        index[digest] = {
            'file': str(output),
            'command': report.command,
            'target': report.target,
            'created_at': report.created_at,
        }
        self._save_index(index)

        counts = report.counts()
        known = counts.get('pass', 0) + counts.get('fail', 0) + counts.get('skipped-over-budget', 0)
        with open(self.csv_file, 'a', newline='', encoding='utf-8') as f:
            csv.writer(f).writerow([
                report.created_at, report.command, report.target, digest,
                counts.get('pass', 0), counts.get('fail', 0), counts.get('skipped-over-budget', 0),
                sum(counts.values()) - known, str(output),
            ])

        logger.info(f"Report saved to {output}")
        return str(output)

    def has_digest(self, digest: str) -> bool:
        return digest in self._load_index()

    def load(self, digest: str) -> Optional[Dict[str, Any]]:
        entry = self._load_index().get(digest)
        if entry is None:
            return None
        try:
            with open(entry['file'], 'r', encoding='utf-8') as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Could not read report {entry['file']}: {e}")
            return None

    def get_all_runs(self) -> List[Dict[str, str]]:
        try:
            with open(self.csv_file, 'r', newline='', encoding='utf-8') as f:
                return list(csv.DictReader(f))
        except OSError:
            return []

    def get_stats(self) -> Dict[str, Any]:
        """Run counts per command and the most recent digest."""
        runs = self.get_all_runs()
        stats: Dict[str, Any] = {
            'total_runs': len(runs),
            'report_dir': str(self.report_dir),
            'commands': {},
            'failing_runs': 0,
            'last_digest': runs[-1]['Digest'] if runs else None,
        }
        for run in runs:
            stats['commands'][run['Command']] = stats['commands'].get(run['Command'], 0) + 1
            if int(run.get('Fail') or 0) > 0:
                stats['failing_runs'] += 1
        return stats
