import io
from openpyxl import Workbook
from openpyxl.styles import Font, PatternFill
from openpyxl.utils import get_column_letter
from openpyxl.formatting.rule import FormulaRule

SUMMARY_HEADERS = ['Entry', 'N', 'D', 'Sup abs error', 'Sup rel error', 'Max tail bound', 'Tolerance', 'Passed']
CURVE_HEADERS = ['t', 'Formula', 'Oracle', 'Abs error', 'Rel error', 'Tail bound']
HEADER_FILL = PatternFill(start_color="DDDDDD", end_color="DDDDDD", fill_type="solid")
FAIL_FILL = PatternFill(start_color='FFC7CE', end_color='FFC7CE', fill_type='solid')


def _style_header(ws):
    for cell in ws[1]:
        cell.font = Font(bold=True)
        cell.fill = HEADER_FILL
    ws.freeze_panes = 'A2'


def _fit_columns(ws):
    # Auto-adjust column width
    for i, col in enumerate(ws.columns, start=1):
        max_length = max((len(str(cell.value)) for cell in col if cell.value is not None), default=0)
        ws.column_dimensions[get_column_letter(i)].width = min(max_length + 2, 50)


def _sheet_title(name, taken):
    # Excel caps titles at 31 characters and forbids []:*?/\
    title = ''.join('_' if ch in '[]:*?/\\' else ch for ch in name)[:31] or 'Entry'
    base, n = title, 2
    while title in taken:
        suffix = f"_{n}"
        title = base[:31 - len(suffix)] + suffix
        n += 1
    taken.add(title)
    return title


def generate_validation_excel(reports, entries=None):
    """
    Generate a workbook for validation reports.
    reports: list of ValidationReport
    entries: optional {name: RfdDescriptor} for the N and D columns
    Returns: BytesIO object containing the xlsx file
    """
    wb = Workbook()

    # Remove default sheet
    if wb.sheetnames:
        wb.remove(wb.active)

    # If no data, create a blank sheet to avoid corruption
    if not reports:
        wb.create_sheet("No Data")
        out = io.BytesIO()
        wb.save(out)
        out.seek(0)
        return out

    entries = entries or {}
    summary = wb.create_sheet("Summary")
    summary.append(SUMMARY_HEADERS)
    _style_header(summary)
    taken = {"Summary"}

    for report in reports:
        entry = entries.get(report.entry)
        summary.append([
            report.entry,
            entry.ambient_dim if entry else None,
            entry.dimension if entry else None,
            report.sup_abs,
            report.sup_rel,
            max(report.tail_bound, default=0.0),
            report.tolerance,
            'YES' if report.passed else 'NO',
        ])

        ws = wb.create_sheet(title=_sheet_title(report.entry, taken))
        ws.append(CURVE_HEADERS)
        _style_header(ws)
        failing = set()
        for i, (t, f, o, a, r, tail) in enumerate(zip(report.t, report.formula, report.oracle, report.abs_err,
                                                      report.rel_err, report.tail_bound), start=2):
            ws.append([t, f, o, a, r, tail])
            err = r if report.relative else a - tail
            if err > report.tolerance:
                failing.add(i)
        for row in sorted(failing):
            for c in range(1, len(CURVE_HEADERS) + 1):
                ws.cell(row=row, column=c).fill = FAIL_FILL
        for key, value in sorted(report.notes.items()):
            if isinstance(value, dict):
                ws.append([])
                ws.append([key])
                for name, v in value.items():
                    ws.append([name, v])
        _fit_columns(ws)

    # Highlight failing entries on the summary sheet
    rule = FormulaRule(formula=['$H2="NO"'], fill=FAIL_FILL)
    summary.conditional_formatting.add(f"A2:H{summary.max_row}", rule)
    _fit_columns(summary)

    out = io.BytesIO()
    wb.save(out)
    out.seek(0)
    return out
