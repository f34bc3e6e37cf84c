from pathfinder.evaluation.metrics import AteSummary, associate, ate_series, ate_summary, rmse_v, rmse_x
from pathfinder.evaluation.report import Report, config_digest, evaluate
from pathfinder.evaluation.summary import render_summary

__all__ = [
    'AteSummary', 'Report', 'associate', 'ate_series', 'ate_summary', 'config_digest', 'evaluate',
    'render_summary', 'rmse_v', 'rmse_x',
]
