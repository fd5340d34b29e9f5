// Non-blocking error banner. API failures surface here; the view that was
// on screen stays untouched.

export function showBanner(container: HTMLElement, message: string): void {
  const doc = container.ownerDocument;
  let banner = container.querySelector<HTMLElement>(".error-banner");
  if (!banner) {
    banner = doc.createElement("div");
    banner.className = "error-banner";
    const text = doc.createElement("span");
    text.className = "error-banner-text";
    banner.appendChild(text);
    const dismiss = doc.createElement("button");
    dismiss.textContent = "dismiss";
    dismiss.addEventListener("click", () => banner?.remove());
    banner.appendChild(dismiss);
    container.prepend(banner);
  }
  const text = banner.querySelector<HTMLElement>(".error-banner-text");
  if (text) text.textContent = message;
}
