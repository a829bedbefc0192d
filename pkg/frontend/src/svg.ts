/**
 * Minimal SVG assembly.
 *
 * Elements are plain strings built in insertion order with fixed coordinate
 * formatting, so a document is a pure function of its inputs.
 */

export type Attrs = Record<string, string | number>;

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Fixed two-decimal pixel coordinates, with trailing zeros trimmed. */
export function px(v: number): string {
  const s = v.toFixed(2);
  return s.replace(/\.?0+$/, "") || "0";
}

export function el(name: string, attrs: Attrs, body?: string): string {
  let open = `<${name}`;
  for (const [key, value] of Object.entries(attrs)) {
    open += ` ${key}="${typeof value === "number" ? px(value) : value}"`;
  }
  return body === undefined ? `${open}/>` : `${open}>${body}</${name}>`;
}

export function text(x: number, y: number, content: string, attrs: Attrs = {}): string {
  return el("text", { x, y, ...attrs }, esc(content));
}

export function svgDocument(width: number, height: number, body: string[]): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`;
  return [head, ...body, "</svg>", ""].join("\n");
}

/**
 * Path data for a sampled curve. Non-drawable samples split the curve into
 * separate subpaths, which is how masked data shows up as gaps.
 */
export function curvePath(xs: string[], ys: (string | null)[]): string {
  const parts: string[] = [];
  let pen = false;
  for (let i = 0; i < ys.length; i++) {
    const y = ys[i];
    if (y === null || y === undefined) {
      pen = false;
      continue;
    }
    parts.push(`${pen ? "L" : "M"}${xs[i]} ${y}`);
    pen = true;
  }
  return parts.join("");
}
