// Error banners: dismissible, optionally with a retry action. New
// banners stack; dismissing removes only the one clicked.

export class BannerArea {
  readonly el: HTMLDivElement;

  constructor() {
    this.el = document.createElement("div");
    this.el.className = "banner-area";
  }

  show(message: string, retry?: () => void): HTMLDivElement {
    const banner = document.createElement("div");
    banner.className = "banner banner-error";
    banner.setAttribute("role", "alert");

    const text = document.createElement("span");
    text.className = "banner-message";
    text.textContent = message;
    banner.appendChild(text);

    if (retry) {
      const retryBtn = document.createElement("button");
      retryBtn.type = "button";
      retryBtn.className = "banner-retry";
      retryBtn.textContent = "Retry";
      retryBtn.addEventListener("click", () => {
        banner.remove();
        retry();
      });
      banner.appendChild(retryBtn);
    }

    const dismiss = document.createElement("button");
    dismiss.type = "button";
    dismiss.className = "banner-dismiss";
    dismiss.setAttribute("aria-label", "Dismiss");
    dismiss.textContent = "×";
    dismiss.addEventListener("click", () => banner.remove());
    banner.appendChild(dismiss);

    this.el.appendChild(banner);
    return banner;
  }

  clear() {
    this.el.replaceChildren();
  }
}
