/** Minimal deterministic SVG assembly: scales, axes, marks. */

export interface Scale {
  (x: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

/** Round tick positions covering the domain (1-2-5 ladder). */
export function ticks(domain: [number, number], count = 6): number[] {
  const [lo, hi] = domain;
  const span = hi - lo;
  if (span <= 0) return [lo];
  const raw = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10) * mag;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

export function fmt(x: number): string {
  if (x === 0) return "0";
  const ax = Math.abs(x);
  if (ax >= 1e4 || ax < 1e-3) return x.toExponential(1);
  return String(Number(x.toPrecision(4)));
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export const MARGIN = { left: 62, right: 18, top: 34, bottom: 46 };

export class Figure {
  parts: string[] = [];

  constructor(
    public width: number,
    public height: number,
    title: string
  ) {
    this.parts.push(
      `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>`
    );
    this.text(width / 2, 18, title, { anchor: "middle", size: 14, weight: "bold" });
  }

  plotArea(): { x: Scale["range"]; y: Scale["range"] } {
    return {
      x: [MARGIN.left, this.width - MARGIN.right],
      y: [this.height - MARGIN.bottom, MARGIN.top],
    };
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { anchor?: string; size?: number; weight?: string; fill?: string } = {}
  ): void {
    const anchor = opts.anchor ?? "start";
    const size = opts.size ?? 11;
    const weight = opts.weight ? ` font-weight="${opts.weight}"` : "";
    const fill = opts.fill ?? "#222";
    this.parts.push(
      `<text x="${r2(x)}" y="${r2(y)}" font-family="sans-serif" font-size="${size}"` +
        `${weight} fill="${fill}" text-anchor="${anchor}">${esc(content)}</text>`
    );
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string): void {
    const [x0, x1] = xs.range;
    const [y0, y1] = ys.range;
    this.parts.push(
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#222" stroke-width="1"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#222" stroke-width="1"/>`
    );
    for (const t of ticks(xs.domain)) {
      const px = xs(t);
      this.parts.push(
        `<line x1="${r2(px)}" y1="${y0}" x2="${r2(px)}" y2="${y0 + 4}" stroke="#222"/>`
      );
      this.text(px, y0 + 16, fmt(t), { anchor: "middle", size: 10 });
    }
    for (const t of ticks(ys.domain)) {
      const py = ys(t);
      this.parts.push(
        `<line x1="${x0 - 4}" y1="${r2(py)}" x2="${x0}" y2="${r2(py)}" stroke="#222"/>`
      );
      this.text(x0 - 7, py + 3, fmt(t), { anchor: "end", size: 10 });
    }
    this.text((x0 + x1) / 2, y0 + 34, xLabel, { anchor: "middle", size: 12 });
    this.parts.push(
      `<text x="16" y="${r2((y0 + y1) / 2)}" font-family="sans-serif" font-size="12" ` +
        `fill="#222" text-anchor="middle" transform="rotate(-90 16 ${r2((y0 + y1) / 2)})">` +
        `${esc(yLabel)}</text>`
    );
  }

  polyline(xs: number[], ys: number[], color: string, width = 1.6, dash = ""): void {
    const pts = xs.map((x, i) => `${r2(x)},${r2(ys[i])}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="${width}"${d}/>`
    );
  }

  circle(x: number, y: number, radius: number, color: string): void {
    this.parts.push(
      `<circle cx="${r2(x)}" cy="${r2(y)}" r="${radius}" fill="${color}"/>`
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${r2(x)}" y="${r2(y)}" width="${r2(w)}" height="${r2(h)}" fill="${fill}"/>`
    );
  }

  legend(entries: [string, string][], x: number, y: number): void {
    entries.forEach(([label, color], i) => {
      const yy = y + 16 * i;
      this.parts.push(
        `<line x1="${x}" y1="${yy - 4}" x2="${x + 22}" y2="${yy - 4}" stroke="${color}" stroke-width="2.5"/>`
      );
      this.text(x + 28, yy, label, { size: 11 });
    });
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r2(x: number): string {
  return (Math.round(x * 100) / 100).toString();
}

const STOPS: [number, number, number][] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

/** Dark-to-bright colormap on [0, 1]. */
export function colormap(v: number): string {
  const t = Math.min(1, Math.max(0, v)) * (STOPS.length - 1);
  const i = Math.min(STOPS.length - 2, Math.floor(t));
  const f = t - i;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r, g, b] = [0, 1, 2].map((k) => mix(STOPS[i][k], STOPS[i + 1][k]));
  return `rgb(${r},${g},${b})`;
}
