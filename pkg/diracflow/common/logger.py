import os
import sys
from typing import Any, Dict, List


class Logger:
    """
    Logger class writing time series to one or more formats

    :param logdir: Directory to save logs in
    :param formats: Formatting of each log ['csv', 'stdout', 'tensorboard']
    :param name: Base name of the files written in logdir
    :param header: Optional provenance string written as a comment line
    :type logdir: string
    :type formats: list
    :type name: string
    :type header: string
    """

    def __init__(
        self,
        logdir: str = None,
        formats: List[str] = ["csv"],
        name: str = "flow",
        header: str = None,
    ):
        if logdir is None:
            self._logdir = os.getcwd()
        else:
            self._logdir = logdir
            if not os.path.isdir(self._logdir):
                os.makedirs(self._logdir)
        self._formats = formats
        self.writers = []
        for ft in self.formats:
            self.writers.append(get_logger_by_name(ft)(self.logdir, name, header))

    def write(self, kvs: Dict[str, Any], log_key: str = "t") -> None:
        """
        Add entry to logger

        :param kvs: Entry to be logged
        :param log_key: Key plotted on x axis
        :type kvs: dict
        :type log_key: str
        """
        for writer in self.writers:
            writer.write(kvs, log_key)

    def close(self) -> None:
        """
        Close the logger
        """
        for writer in self.writers:
            writer.close()

    @property
    def logdir(self) -> str:
        """
        Return log directory
        """
        return self._logdir

    @property
    def formats(self) -> List[str]:
        """
        Return save format(s)
        """
        return self._formats


class HumanOutputFormat:
    """
    Aligned, human readable columns on stdout and in `<name>.log`

    :param logdir: Directory at which log is written
    :param name: Base name of the log file
    :param header: Optional provenance line
    :type logdir: string
    :type name: string
    :type header: string
    """

    def __init__(self, logdir: str, name: str = "flow", header: str = None):
        self.file = os.path.join(logdir, "{}.log".format(name))
        self.header = header
        self.first = True
        self.maxlen = 15

    def write(self, kvs: Dict[str, Any], log_key: str = "t") -> None:
        """
        Log the entry out in human readable format

        :param kvs: Entries to be logged
        :type kvs: dict
        """
        first = self.first
        self.write_to_file(kvs, sys.stdout, first)
        with open(self.file, "a") as file:
            self.write_to_file(kvs, file, first)
        self.first = False

    def write_to_file(self, kvs: Dict[str, Any], file=sys.stdout, first=False) -> None:
        if first:
            self.maxlen = max(15, max(len(str(key)) for key in kvs))
            if self.header is not None:
                print("# {}".format(self.header), file=file)
            print(
                "  ".join(str(key).ljust(self.maxlen) for key in kvs).rstrip(),
                file=file,
            )
        print(
            "  ".join(self.format(value).ljust(self.maxlen) for value in kvs.values()).rstrip(),
            file=file,
        )

    def format(self, value: Any) -> str:
        if isinstance(value, float):
            return "{:.6g}".format(value)
        return str(value)

    def close(self) -> None:
        pass


class TensorboardLogger:
    """
    Tensorboard Logging class

    :param logdir: Directory to save log at
    :type logdir: string
    """

    def __init__(self, logdir: str, name: str = "flow", header: str = None):
        from torch.utils.tensorboard import SummaryWriter

        self.logdir = os.path.join(logdir, name)
        os.makedirs(self.logdir, exist_ok=True)
        self.writer = SummaryWriter(self.logdir)
        if header is not None:
            self.writer.add_text("provenance", header)
        self.step = 0

    def write(self, kvs: Dict[str, Any], log_key: str = "t") -> None:
        """
        Add entry to logger; scalars are plotted against the running row count
        since tensorboard steps are integers

        :param kvs: Entries to be logged
        :param log_key: Key stored alongside every scalar
        :type kvs: dict
        :type log_key: str
        """
        for key, value in kvs.items():
            if key == log_key:
                continue
            self.writer.add_scalar(key, float(value), self.step)
        self.writer.add_scalar(log_key, float(kvs[log_key]), self.step)
        self.step += 1

    def close(self) -> None:
        """
        Close the logger
        """
        self.writer.close()


class CSVLogger:
    """
    CSV Logging class, header row "t,<name>..." below an optional comment line

    :param logdir: Directory to save log at
    :param name: Base name of the csv file
    :param header: Optional provenance string
    :type logdir: string
    :type name: string
    :type header: string
    """

    def __init__(self, logdir: str, name: str = "flow", header: str = None):
        self.logdir = logdir
        os.makedirs(self.logdir, exist_ok=True)
        self.path = os.path.join(logdir, "{}.csv".format(name))
        self.file = open(self.path, "w")
        if header is not None:
            self.file.write("# {}\n".format(header))
        self.first = True
        self.keynames = {}

    def write(self, kvs: Dict[str, Any], log_key: str = "t") -> None:
        """
        Add entry to logger

        :param kvs: Entries to be logged
        :type kvs: dict
        """
        if self.first:
            for i, key in enumerate(kvs.keys()):
                self.keynames[key] = i
            self.file.write(",".join(kvs.keys()))
            self.file.write("\n")
            self.first = False

        for i, key in enumerate(kvs.keys()):
            if key not in self.keynames:
                raise ValueError(
                    "A new value '{}' cannot be added to CSVLogger".format(key)
                )
            if i != self.keynames[key]:
                raise ValueError("Value not at the same index as when initialized")

        self.file.write(",".join(repr(float(value)) for value in kvs.values()))
        self.file.write("\n")

    def close(self) -> None:
        """
        Close the logger
        """
        self.file.close()


logger_registry = {
    "stdout": HumanOutputFormat,
    "tensorboard": TensorboardLogger,
    "csv": CSVLogger,
}


def get_logger_by_name(name: str):
    """
    Gets the logger given the type of logger

    :param name: Name of the output format
    :type name: string
    :returns: Logger writer class
    """
    if name not in logger_registry.keys():
        raise NotImplementedError
    else:
        return logger_registry[name]
