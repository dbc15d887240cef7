from warpflow.scenarios.experiment import run_experiment

if __name__ == "__main__":
    run_experiment()
