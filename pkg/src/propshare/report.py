"""Run reports with a tab-delimited machine rendering and an aligned text rendering.

Both renderings format numbers through :func:`fmt` so they agree digit for
digit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

FORMAT_VERSION = 1


def fmt(value) -> str:
    """Numbers to 9 significant digits; everything else via ``str``."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value == 0.0:
            return "0"
        return format(value, ".9g")
    if isinstance(value, (tuple, list)):
        return "[" + ",".join(fmt(v) for v in value) + "]"
    if value is None:
        return "-"
    return str(value)


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"table {self.name}: expected {len(self.columns)} cells")
        self.rows.append(list(row))


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    meta: dict = field(default_factory=dict)
    tables: list[Table] = field(default_factory=list)

    def table(self, name, columns) -> Table:
        t = Table(name, list(columns))
        self.tables.append(t)
        return t

    def to_tsv(self) -> str:
        lines = [
            f"format_version\t{FORMAT_VERSION}",
            f"command\t{self.command}",
            f"inputs_digest\t{self.inputs_digest}",
        ]
        for key, value in self.meta.items():
            lines.append(f"meta\t{key}\t{fmt(value)}")
        for t in self.tables:
            lines.append(f"table\t{t.name}")
            lines.append("\t".join(t.columns))
            lines.extend("\t".join(fmt(v) for v in row) for row in t.rows)
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        out = [f"{self.command}  (inputs {self.inputs_digest}, format v{FORMAT_VERSION})"]
        if self.meta:
            width = max(len(k) for k in self.meta)
            out.extend(f"  {k.ljust(width)}  {fmt(v)}" for k, v in self.meta.items())
        for t in self.tables:
            cells = [t.columns] + [[fmt(v) for v in row] for row in t.rows]
            widths = [max(len(r[c]) for r in cells) for c in range(len(t.columns))]
            out.append("")
            out.append(f"[{t.name}]")
            for r in cells:
                out.append("  " + "  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip())
        return "\n".join(out) + "\n"


def parse_tsv(text: str) -> dict:
    """Read a machine report back into ``{"header", "meta", "tables"}`` (cells stay strings)."""
    header, meta, tables = {}, {}, {}
    current = None
    expect_columns = False
    for line in text.splitlines():
        parts = line.split("\t")
        if expect_columns:
            current["columns"] = parts
            expect_columns = False
        elif parts[0] == "table" and len(parts) == 2:
            current = {"columns": [], "rows": []}
            tables[parts[1]] = current
            expect_columns = True
        elif current is not None:
            current["rows"].append(parts)
        elif parts[0] == "meta":
            meta[parts[1]] = parts[2]
        else:
            header[parts[0]] = parts[1]
    return {"header": header, "meta": meta, "tables": tables}
