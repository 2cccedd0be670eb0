import numpy as np


def fmt6(value: float) -> str:
    """Six significant digits, never in exponent form."""
    text = f"{value:.6g}"
    if "e" in text:
        text = np.format_float_positional(float(text), trim="-")
    return "0" if text == "-0" else text
