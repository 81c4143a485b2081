def rel(a, b):
    den = max(abs(a), abs(b))
    return abs(a - b) / den if den else 0.0
