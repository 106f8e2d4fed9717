from openpyxl import load_workbook
from openpyxl.styles import Font
from openpyxl.utils import get_column_letter

import pandas as pd


def adjust_column_width(ws):
    """첫 번째 행(헤더)과 데이터 중 가장 긴 값을 기준으로 열 너비를 맞춥니다."""
    for col in range(1, ws.max_column + 1):
        longest = 0
        for row in range(1, min(ws.max_row, 200) + 1):
            value = ws.cell(row=row, column=col).value
            if value is not None:
                longest = max(longest, len(str(value)))
        if longest:
            ws.column_dimensions[get_column_letter(col)].width = min(longest + 2, 80)


def apply_auto_filter(ws):
    """데이터가 있는 범위를 자동 필터로 설정합니다."""
    end_row = ws.max_row
    end_col = ws.max_column
    ws.auto_filter.ref = f'A1:{get_column_letter(end_col)}{end_row}'


def apply_header_style(ws):
    for col in range(1, ws.max_column + 1):
        ws.cell(row=1, column=col).font = Font(bold=True)


def process_excel_file(file_name):
    """엑셀 파일의 모든 시트에 열 너비 조정, 자동 필터, 헤더 강조를 적용합니다."""
    wb = load_workbook(file_name)
    for sheet_name in wb.sheetnames:
        ws = wb[sheet_name]
        adjust_column_width(ws)
        apply_auto_filter(ws)
        apply_header_style(ws)
    wb.save(file_name)
    wb.close()


def write_excel_report(file_name, sheets: dict):
    """{시트명: DataFrame} 을 하나의 xlsx 로 저장한 뒤 서식을 적용합니다."""
    with pd.ExcelWriter(file_name, engine="xlsxwriter") as writer:
        for sheet_name, frame in sheets.items():
            # 시트명은 31자 제한
            frame.to_excel(writer, sheet_name=sheet_name[:31], index=False)
    process_excel_file(file_name)
    return file_name
