import hypothesis

hypothesis.settings.register_profile(
    "ci", max_examples=50, deadline=None, derandomize=True)
hypothesis.settings.load_profile("ci")
