"""
Evaluation and interpretability reports: metrics, per-level gate statistics,
AAV of GLM weights and weight heatmaps.
"""
