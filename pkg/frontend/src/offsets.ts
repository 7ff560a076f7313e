// The service indexes text by Unicode code points; the DOM indexes by UTF-16
// code units. Astral characters (emoji, some CJK extensions) occupy two
// units but one code point, so the two scales drift apart. Every offset that
// crosses the wire goes through one of these converters.

/** Count code points in the first `utf16` units of `text`. */
export function toCodePoints(text: string, utf16: number): number {
  if (utf16 <= 0) return 0;
  let units = 0;
  let points = 0;
  while (units < utf16 && units < text.length) {
    const cp = text.codePointAt(units)!;
    units += cp > 0xffff ? 2 : 1;
    points += 1;
  }
  return points;
}

/** UTF-16 index of the code point at position `points` in `text`. */
export function toUtf16(text: string, points: number): number {
  if (points <= 0) return 0;
  let units = 0;
  let seen = 0;
  while (seen < points && units < text.length) {
    const cp = text.codePointAt(units)!;
    units += cp > 0xffff ? 2 : 1;
    seen += 1;
  }
  return units;
}

/** Slice `text` by code-point offsets. */
export function sliceCodePoints(text: string, start: number, end: number): string {
  return text.slice(toUtf16(text, start), toUtf16(text, end));
}

/** Code-point length of `text`. */
export function codePointLength(text: string): number {
  let n = 0;
  for (const _ of text) n += 1;
  return n;
}
