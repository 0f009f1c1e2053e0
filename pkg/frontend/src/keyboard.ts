// Keyboard bindings for the worklist: a = accept, x = reject, o = open,
// j/k = move focus, escape = back. Ignored while typing in a field.

export interface KeyboardActions {
  accept(): void;
  reject(): void;
  open(): void;
  next(): void;
  previous(): void;
  back(): void;
}

export function handleKey(
  key: string,
  inField: boolean,
  actions: KeyboardActions,
): boolean {
  if (inField) return false;
  switch (key.toLowerCase()) {
    case "a":
      actions.accept();
      return true;
    case "x":
      actions.reject();
      return true;
    case "o":
    case "enter":
      actions.open();
      return true;
    case "j":
      actions.next();
      return true;
    case "k":
      actions.previous();
      return true;
    case "escape":
      actions.back();
      return true;
    default:
      return false;
  }
}
