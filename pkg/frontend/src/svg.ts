/** Minimal SVG document builder (plain strings, no DOM). */

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function tag(name: string, attrs: Record<string, string | number>, body = ""): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ");
  return body ? `<${name} ${parts}>${body}</${name}>` : `<${name} ${parts}/>`;
}

export function fmt(value: number): string {
  return Number(value.toFixed(3)).toString();
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    tag("rect", { x: 0, y: 0, width, height, fill: "white" }),
    ...body,
    "</svg>",
  ].join("\n");
}

export function polylinePath(points: Array<[number, number]>): string {
  return points
    .map(([x, y], idx) => `${idx === 0 ? "M" : "L"}${fmt(x)},${fmt(y)}`)
    .join(" ");
}

export function cross(x: number, y: number, size: number): string {
  const s = size / 2;
  return `M${fmt(x - s)},${fmt(y - s)} L${fmt(x + s)},${fmt(y + s)} ` +
    `M${fmt(x - s)},${fmt(y + s)} L${fmt(x + s)},${fmt(y - s)}`;
}
