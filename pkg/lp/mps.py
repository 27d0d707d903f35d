"""
MPS-Export (festes Format) und ein Leser für die selbst geschriebenen Dateien
"""
import math
from typing import Dict, List, Optional

import numpy as np

from utils.errors import DataFormatError, ValidationError
from .problem import LinearProgram

OBJECTIVE_ROW = "OBJ"

NAME_WIDTH = 8
NUMBER_WIDTH = 12

_ROW_TYPE = {"<=": "L", "=": "E", ">=": "G"}
_RELATION = {value: key for key, value in _ROW_TYPE.items()}


def _number(value: float) -> str:
    """Zahl mit höchstens NUMBER_WIDTH Zeichen, so viele Stellen wie hineinpassen"""
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"MPS braucht endliche Zahlen, nicht {value}")
    if value == 0.0:
        return "0"  # kein "-0"
    for digits in range(NUMBER_WIDTH, 0, -1):
        text = "%.*g" % (digits, value)
        if len(text) <= NUMBER_WIDTH:
            return text
    raise ValidationError(f"{value} passt nicht in {NUMBER_WIDTH} Zeichen")


def _name(name: str) -> str:
    if not name or len(name) > NAME_WIDTH or any(char.isspace() for char in name):
        raise ValidationError(f"MPS-Name '{name}' braucht 1 bis {NAME_WIDTH} Zeichen ohne Leerzeichen")
    return name


def _entry(first: str, second: str, value: float) -> str:
    # Felder 5-12, 15-22, 25-36
    return "    %-8s  %-8s  %s\n" % (first, second, _number(value))


def variable_names(lp: LinearProgram) -> List[str]:
    if lp.var_names is not None:
        return list(lp.var_names)
    return [f"X{j + 1:07d}" for j in range(lp.n_vars)]


def row_names(lp: LinearProgram) -> List[str]:
    if lp.row_names is not None:
        return list(lp.row_names)
    return [f"R{i + 1:07d}" for i in range(lp.n_rows)]


def write_mps(lp: LinearProgram, name: str = "OTDETECT") -> str:
    """
    Schreibt ein LP im festen MPS-Format.

    Spalten erscheinen in Variablenreihenfolge, innerhalb einer Spalte die
    Zeilen aufsteigend und danach die Zielfunktion. Gleiche LPs ergeben
    byte-identischen Text.

    Namen stehen in den Spalten 5-12 und 15-22, Zahlen in 25-36. Eine Zahl
    behält so viele signifikante Stellen, wie in 12 Zeichen passen.

    Raises:
        ValidationError: Name länger als 8 Zeichen oder nicht endliche Zahl

    Args:
        lp: Lineares Programm
        name: Modellname für die NAME-Zeile

    Returns:
        MPS-Text
    """
    columns = [_name(column) for column in variable_names(lp)]
    rows = [_name(row) for row in row_names(lp)]
    out = [f"NAME          {name}\n"]
    if lp.maximize:
        out.append("OBJSENSE\n    MAX\n")

    out.append("ROWS\n")
    out.append(f" N  {OBJECTIVE_ROW}\n")
    for row, relation in zip(rows, lp.relations):
        out.append(f" {_ROW_TYPE[relation]}  {row}\n")

    out.append("COLUMNS\n")
    A = lp.A.tocsc()
    A.sort_indices()
    for j, column in enumerate(columns):
        start, end = A.indptr[j], A.indptr[j + 1]
        for i, value in zip(A.indices[start:end], A.data[start:end]):
            out.append(_entry(column, rows[i], value))
        if lp.objective[j] != 0.0 or start == end:
            # Variablen ohne Einträge trotzdem deklarieren
            out.append(_entry(column, OBJECTIVE_ROW, lp.objective[j]))

    out.append("RHS\n")
    for row, value in zip(rows, lp.rhs):
        if value != 0.0:
            out.append(_entry("RHS", row, value))

    out.append("BOUNDS\n")
    for column, low, high in zip(columns, lp.lower, lp.upper):
        if math.isfinite(low) and low == high:
            out.append(" FX BND       %-8s  %s\n" % (column, _number(low)))
            continue
        if math.isinf(low):
            if math.isinf(high):
                out.append(" FR BND       %-8s\n" % column)
                continue
            out.append(" MI BND       %-8s\n" % column)
        elif low != 0.0:
            out.append(" LO BND       %-8s  %s\n" % (column, _number(low)))
        if math.isfinite(high):
            out.append(" UP BND       %-8s  %s\n" % (column, _number(high)))
    out.append("ENDATA\n")
    return "".join(out)


def read_mps(text: str) -> LinearProgram:
    """
    Liest MPS-Text im Format von write_mps zurück.

    Unterstützt die Abschnitte NAME, OBJSENSE, ROWS, COLUMNS, RHS, BOUNDS,
    ENDATA. Fehler werden mit Zeilennummer gemeldet.

    Returns:
        LinearProgram mit den Variablen- und Zeilennamen der Datei
    """
    section: Optional[str] = None
    sense = "minimize"
    objective_row: Optional[str] = None
    row_index: Dict[str, int] = {}
    relations: List[str] = []
    names_rows: List[str] = []
    col_index: Dict[str, int] = {}
    triplets = []
    objective: Dict[int, float] = {}
    rhs: Dict[int, float] = {}
    bounds: Dict[int, List[float]] = {}

    def column(name: str) -> int:
        if name not in col_index:
            col_index[name] = len(col_index)
        return col_index[name]

    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("*"):
            continue
        fields = raw.split()
        try:
            if not raw[0].isspace():
                section = fields[0]
                if section == "ENDATA":
                    break
                if section not in ("NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS"):
                    raise DataFormatError(f"Unbekannter Abschnitt {section}", line=line_no)
                if section == "OBJSENSE" and len(fields) > 1:
                    sense = "maximize" if fields[1].upper().startswith("MAX") else "minimize"
                continue

            if section == "OBJSENSE":
                sense = "maximize" if fields[0].upper().startswith("MAX") else "minimize"
            elif section == "ROWS":
                kind, name = fields[0], fields[1]
                if kind == "N":
                    objective_row = name
                else:
                    row_index[name] = len(relations)
                    relations.append(_RELATION[kind])
                    names_rows.append(name)
            elif section == "COLUMNS":
                j = column(fields[0])
                for row, value in zip(fields[1::2], fields[2::2]):
                    if row == objective_row:
                        objective[j] = float(value)
                    else:
                        triplets.append((row_index[row], j, float(value)))
            elif section == "RHS":
                for row, value in zip(fields[1::2], fields[2::2]):
                    if row != objective_row:
                        rhs[row_index[row]] = float(value)
            elif section == "BOUNDS":
                kind, name = fields[0], fields[2]
                entry = bounds.setdefault(column(name), [0.0, math.inf])
                value = float(fields[3]) if len(fields) > 3 else None
                if kind == "FX":
                    entry[0] = entry[1] = value
                elif kind == "FR":
                    entry[0], entry[1] = -math.inf, math.inf
                elif kind == "MI":
                    entry[0] = -math.inf
                elif kind == "LO":
                    entry[0] = value
                elif kind == "UP":
                    entry[1] = value
                else:
                    raise DataFormatError(f"Schrankentyp {kind} nicht unterstützt", line=line_no)
            else:
                raise DataFormatError("Eintrag außerhalb eines Abschnitts", line=line_no)
        except (IndexError, KeyError, ValueError) as exc:
            if isinstance(exc, DataFormatError):
                raise
            raise DataFormatError(f"Ungültige MPS-Zeile '{raw.strip()}'", line=line_no) from exc

    n_vars = len(col_index)
    lower = np.zeros(n_vars)
    upper = np.full(n_vars, np.inf)
    for j, (low, high) in bounds.items():
        lower[j], upper[j] = low, high
    objective_vector = np.zeros(n_vars)
    for j, value in objective.items():
        objective_vector[j] = value
    rhs_vector = np.zeros(len(relations))
    for i, value in rhs.items():
        rhs_vector[i] = value

    if triplets:
        rows, cols, coeffs = (np.array(part) for part in zip(*triplets))
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        coeffs = np.zeros(0)
    return LinearProgram(
        n_vars=n_vars,
        objective=objective_vector,
        rows=rows,
        cols=cols,
        coeffs=coeffs,
        relations=tuple(relations),
        rhs=rhs_vector,
        sense=sense,
        lower=lower,
        upper=upper,
        var_names=tuple(col_index),
        row_names=tuple(names_rows),
    )
