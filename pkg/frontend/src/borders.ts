import { MatchTag } from "./types";

export type BorderColor = "red" | "orange" | "green" | null;

/** Border color of a rule card given how the recommendation matched it:
 *  both axes -> red, y only -> orange, x only -> green, no match -> none. */
export function borderForMatch(tag: MatchTag): BorderColor {
  switch (tag) {
    case "both":
      return "red";
    case "y":
      return "orange";
    case "x":
      return "green";
    default:
      return null;
  }
}

export function applyBorder(el: HTMLElement, tag: MatchTag): void {
  const color = borderForMatch(tag);
  el.classList.remove("match-red", "match-orange", "match-green");
  if (color) {
    el.classList.add(`match-${color}`);
    el.dataset.match = tag;
  } else {
    delete el.dataset.match;
  }
}
