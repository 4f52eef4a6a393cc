import hypothesis
import numpy as np

# Underflow is routine in long power-iteration runs (non-dominant components
# decay into denormals); everything else should surface.
np.seterr(all="warn", under="ignore")

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("ci")
