String slug() {
  return title.trim().toLowerCase();
}
