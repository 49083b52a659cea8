"""Curriculum learning for code-mixed sentiment analysis.

Character-trigram subword encoding, a hierarchical two-layer bidirectional
LSTM with per-task heads (language ID, POS, next-subword LM, sentiment), and
ULMFiT-style transfer machinery (discriminative per-layer learning rates,
gradual unfreezing), all on a from-scratch numpy tensor engine with
hand-written, gradient-checked backpropagation.
"""

__version__ = "0.1.0"
