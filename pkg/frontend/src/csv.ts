/** Parsing for the two CSV artifacts: smear reports and kernel dumps.
 *
 * Both carry `# key = value` metadata lines before the header row. Fields
 * are plain decimal strings (never quoted), so a simple split suffices.
 */

export interface ReportRow {
  mu: number;
  value: number;
  refs: Record<string, number>;
  errs: Record<string, number | null>;
}

export interface Report {
  metadata: Record<string, string>;
  rows: ReportRow[];
  refNames: string[];
}

export interface KernelCell {
  i: number;
  j: number;
  x: number;
  y: number;
  value: number;
}

export interface KernelMatrix {
  metadata: Record<string, string>;
  dim: number;
  cells: KernelCell[];
}

function splitMetadata(text: string): { metadata: Record<string, string>; lines: string[] } {
  const metadata: Record<string, string> = {};
  const lines: string[] = [];
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1);
      const eq = body.indexOf("=");
      if (eq >= 0) {
        metadata[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      }
      continue;
    }
    lines.push(line);
  }
  return { metadata, lines };
}

export function parseReport(text: string): Report {
  const { metadata, lines } = splitMetadata(text);
  if (lines.length === 0) {
    throw new Error("report CSV has no header row");
  }
  const header = lines[0].split(",");
  const muIdx = header.indexOf("mu");
  const valueIdx = header.indexOf("value");
  if (muIdx < 0 || valueIdx < 0) {
    throw new Error(`report CSV needs mu and value columns, got: ${lines[0]}`);
  }
  const refCols: Array<[string, number]> = [];
  const errCols: Array<[string, number]> = [];
  header.forEach((name, idx) => {
    if (name.startsWith("ref_")) refCols.push([name.slice(4), idx]);
    if (name.startsWith("err_")) errCols.push([name.slice(4), idx]);
  });
  const rows: ReportRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`report row has ${cells.length} cells, header has ${header.length}`);
    }
    const refs: Record<string, number> = {};
    for (const [name, idx] of refCols) refs[name] = Number(cells[idx]);
    const errs: Record<string, number | null> = {};
    for (const [name, idx] of errCols) {
      errs[name] = cells[idx] === "" ? null : Number(cells[idx]);
    }
    rows.push({ mu: Number(cells[muIdx]), value: Number(cells[valueIdx]), refs, errs });
  }
  if (rows.length === 0) {
    throw new Error("report CSV has no data rows");
  }
  for (const row of rows) {
    if (!Number.isFinite(row.mu) || !Number.isFinite(row.value)) {
      throw new Error("report CSV contains non-numeric mu/value cells");
    }
  }
  return { metadata, rows, refNames: refCols.map(([name]) => name) };
}

export function parseKernel(text: string): KernelMatrix {
  const { metadata, lines } = splitMetadata(text);
  if (lines.length === 0 || lines[0] !== "i,j,x_i,y_j,value") {
    throw new Error("kernel CSV must start with header i,j,x_i,y_j,value");
  }
  const cells: KernelCell[] = [];
  let dim = 0;
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== 5) {
      throw new Error(`kernel row needs 5 cells: ${line}`);
    }
    const cell: KernelCell = {
      i: Number(parts[0]),
      j: Number(parts[1]),
      x: Number(parts[2]),
      y: Number(parts[3]),
      value: Number(parts[4]),
    };
    if (![cell.i, cell.j, cell.x, cell.y, cell.value].every(Number.isFinite)) {
      throw new Error(`kernel row not numeric: ${line}`);
    }
    dim = Math.max(dim, cell.i + 1, cell.j + 1);
    cells.push(cell);
  }
  if (cells.length === 0) {
    throw new Error("kernel CSV has no data rows");
  }
  if (cells.length !== dim * dim) {
    throw new Error(`kernel CSV has ${cells.length} cells, expected ${dim * dim}`);
  }
  return { metadata, dim, cells };
}

/** Largest |K(i,j) - K(j,i)| relative to the largest magnitude; kernels should be symmetric. */
export function kernelAsymmetry(kernel: KernelMatrix): number {
  const byIndex = new Map<string, number>();
  for (const c of kernel.cells) byIndex.set(`${c.i},${c.j}`, c.value);
  let worst = 0;
  let scale = 0;
  for (const c of kernel.cells) {
    scale = Math.max(scale, Math.abs(c.value));
    const mirror = byIndex.get(`${c.j},${c.i}`);
    if (mirror !== undefined) worst = Math.max(worst, Math.abs(c.value - mirror));
  }
  return scale > 0 ? worst / scale : 0;
}
