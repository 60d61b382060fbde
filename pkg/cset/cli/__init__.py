from .main import main, buildParser, buildConfig, RunConfig
from .main import cmd_ingest, cmd_synth, cmd_fit_temp, cmd_tune, cmd_calibrate, cmd_predict, cmd_evaluate, cmd_experiment
from .main import COMMANDS
from .main import EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DATA
