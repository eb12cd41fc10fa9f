import humanize

MBITS_PER_BIT = 1000.0


def to_mbits(bits):
    """Bits to millibits, the unit synergy tables are printed in."""
    return bits * MBITS_PER_BIT


def humanize_compact(value):
    """
    Convert event counts into compact form (1k, 1.5M, 2B).
    """
    if abs(value) < 1000:
        return str(value)
    text = humanize.intword(value, format="%.1f")

    # Replace words with symbols
    text = (
        text.replace(" thousand", "k")
            .replace(" million", "M")
            .replace(" billion", "B")
            .replace(" trillion", "T")
    )
    return text


def format_number(value, digits=3):
    if value is None:
        return "-"
    if isinstance(value, int):
        return humanize.intcomma(value)
    # round first so tiny negatives print as 0.000, not -0.000
    return f"{round(value, digits) + 0.0:.{digits}f}"


def format_table(headers, rows, digits=3):
    """Render rows as a right-aligned plain-text table."""
    cells = [[str(header) for header in headers]]
    cells += [[value if isinstance(value, str) else format_number(value, digits) for value in row] for row in rows]
    widths = [max(len(row[column]) for row in cells) for column in range(len(headers))]
    lines = ["  ".join(cell.rjust(width) for cell, width in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
