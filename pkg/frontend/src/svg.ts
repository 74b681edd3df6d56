/** Minimal deterministic SVG scene builder.
 *
 * No DOM, no dates, no randomness: identical inputs yield byte-identical
 * files, which is part of the output contract.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 36, right: 24, bottom: 46, left: 56 };

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Fixed-precision coordinate formatting keeps the output stable. */
export function fmt(x: number): string {
  const r = Math.round(x * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export function linearScale(
  domain: [number, number],
  range: [number, number]
): (x: number) => number {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (x) => r0 + ((x - d0) / span) * (r1 - r0);
}

/** Round axis tick positions covering [lo, hi] with a step of 1/2/5*10^k. */
export function ticks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9; v += step) {
    out.push(Math.abs(v) < 1e-12 ? 0 : v);
  }
  return out;
}

export class Scene {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  rect(x: number, y: number, w: number, h: number, fill: string, extra = ""): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"${extra}/>`
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"/>`
    );
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { size?: number; anchor?: string; fill?: string; rotate?: boolean } = {}
  ): void {
    const size = opts.size ?? 12;
    const anchor = opts.anchor ?? "middle";
    const fill = opts.fill ?? "#222";
    const transform = opts.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" ` +
        `fill="${fill}" font-family="Helvetica, Arial, sans-serif"${transform}>` +
        `${escapeXml(content)}</text>`
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

/** Standard frame: title, axis lines, y ticks with grid, axis labels. */
export function drawFrame(
  scene: Scene,
  margin: Margin,
  title: string,
  xLabel: string,
  yLabel: string,
  yTicks: { value: number; label: string }[],
  yScale: (v: number) => number
): void {
  const plotW = scene.width - margin.left - margin.right;
  scene.text(scene.width / 2, 20, title, { size: 14 });
  for (const t of yTicks) {
    const y = yScale(t.value);
    scene.line(margin.left, y, margin.left + plotW, y, "#ddd");
    scene.text(margin.left - 8, y + 4, t.label, { anchor: "end", size: 11 });
  }
  scene.line(margin.left, margin.top, margin.left, scene.height - margin.bottom, "#222");
  scene.line(
    margin.left,
    scene.height - margin.bottom,
    scene.width - margin.right,
    scene.height - margin.bottom,
    "#222"
  );
  scene.text(scene.width / 2, scene.height - 8, xLabel, { size: 12 });
  scene.text(16, scene.height / 2, yLabel, { size: 12, rotate: true });
}

/** Shared empty-input rendering: empty axes plus a visible warning note. */
export function emptyFigure(title: string, note: string): string {
  const scene = new Scene(640, 400);
  const margin = DEFAULT_MARGIN;
  drawFrame(scene, margin, title, "", "", [], () => 0);
  scene.text(320, 200, `warning: ${note}`, { size: 13, fill: "#a33" });
  return scene.render();
}
