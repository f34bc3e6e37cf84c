import jinja2

summary_template = """
Trajectory evaluation
=====================
samples matched   {{ report.matched }}{% if report.unmatched %} ({{ report.unmatched }} unmatched){% endif %}
RMSE position     {{ '%.3f' % report.rmse_x_mm }} mm
RMSE velocity     {{ '%.3f' % report.rmse_v_mm_s }} mm/s

ATE (mm)
  min     {{ '%.3f' % report.summary.min }}
  q1      {{ '%.3f' % report.summary.q1 }}
  median  {{ '%.3f' % report.summary.median }}
  q3      {{ '%.3f' % report.summary.q3 }}
  max     {{ '%.3f' % report.summary.max }}
{% if report.runtimes %}
Stage runtimes (s)
{% for stage, seconds in report.runtimes|dictsort %}  {{ stage.ljust(8) }}{{ '%.2f' % seconds }}
{% endfor %}{% endif %}{% if report.config_digest %}
config {{ report.config_digest }}
{% endif %}"""


def render_summary(report):
    t = jinja2.Template(summary_template, keep_trailing_newline=True)
    return t.render(report=report).lstrip('\n')
