import csv
import hashlib
import io
import json
import logging
from dataclasses import dataclass, field

from pathfinder.errors import DataError
from pathfinder.evaluation.metrics import AteSummary, associate, ate_series, ate_summary, rmse_v, rmse_x
from pathfinder.storage import dumps_canonical

Logger = logging.getLogger('pathfinder.evaluation.report')

FORMAT_VERSION = 1


def config_digest(payload):
    """SHA-256 of the canonical JSON form of ``payload``."""
    return hashlib.sha256(dumps_canonical(payload).encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class Report:
    rmse_x_mm: float
    rmse_v_mm_s: float
    ate_times: tuple
    ate_mm: tuple
    summary: AteSummary
    matched: int
    unmatched: int
    config_digest: str = ''
    runtimes: dict = field(default_factory=dict)

    def to_dict(self):
        data = {
            'format_version': FORMAT_VERSION,
            'rmse_x_mm': self.rmse_x_mm,
            'rmse_v_mm_s': self.rmse_v_mm_s,
            'ate': {'t': list(self.ate_times), 'mm': list(self.ate_mm)},
            'ate_summary': self.summary.to_dict(),
            'matched': self.matched,
            'unmatched': self.unmatched,
            'config_digest': self.config_digest,
        }
        if self.runtimes:
            data['runtimes'] = dict(self.runtimes)
        return data

    def dumps(self):
        return dumps_canonical(self.to_dict(), indent=2) + '\n'

    @classmethod
    def from_dict(cls, data, source='<report>'):
        try:
            if int(data['format_version']) != FORMAT_VERSION:
                raise DataError('unsupported report version %s' % data['format_version'], source)
            summary = data['ate_summary']
            return cls(
                rmse_x_mm=float(data['rmse_x_mm']),
                rmse_v_mm_s=float(data['rmse_v_mm_s']),
                ate_times=tuple(float(v) for v in data['ate']['t']),
                ate_mm=tuple(float(v) for v in data['ate']['mm']),
                summary=AteSummary(*(float(summary[k]) for k in ('min', 'q1', 'median', 'q3', 'max'))),
                matched=int(data['matched']),
                unmatched=int(data['unmatched']),
                config_digest=str(data['config_digest']),
                runtimes={k: float(v) for k, v in data.get('runtimes', {}).items()},
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataError('malformed report (%s)' % e, source)

    @classmethod
    def loads(cls, text, source='<report>'):
        try:
            data = json.loads(text)
        except ValueError as e:
            raise DataError('report is not valid JSON (%s)' % e, source)
        return cls.from_dict(data, source)

    def ate_csv(self):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(['t', 'ate_mm'])
        for t, e in zip(self.ate_times, self.ate_mm):
            writer.writerow([repr(t), repr(e)])
        return buffer.getvalue()


def evaluate(gt, est, digest='', runtimes=None):
    """Compare an estimated trajectory against ground truth."""
    pairs = associate(gt, est)
    times, errors = ate_series(gt, est)
    report = Report(
        rmse_x_mm=rmse_x(gt, est),
        rmse_v_mm_s=rmse_v(gt, est),
        ate_times=tuple(float(t) for t in times),
        ate_mm=tuple(float(e) for e in errors),
        summary=ate_summary(errors),
        matched=len(pairs),
        unmatched=pairs.unmatched,
        config_digest=digest,
        runtimes=dict(runtimes or {}),
    )
    Logger.info('RMSE_x %.2f mm, RMSE_v %.2f mm/s over %d samples (%d unmatched)'
                % (report.rmse_x_mm, report.rmse_v_mm_s, report.matched, report.unmatched))
    return report
