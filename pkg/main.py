from fastapi import FastAPI
from routes import body, camera, fitting, metrics, synth
from services import __version__
from services.body.template_store import init_template

app = FastAPI(title="metric-hmr-toolkit", version=__version__)

# Materialize the body template the routes share
init_template()

app.include_router(camera.router, prefix="/camera", tags=["camera"])
app.include_router(body.router, prefix="/body", tags=["body"])
app.include_router(fitting.router, prefix="/fitting", tags=["fitting"])
app.include_router(metrics.router, prefix="/metrics", tags=["metrics"])
app.include_router(synth.router, prefix="/synth", tags=["synth"])

@app.get("/")
def read_root():
    return {"message": "metric-hmr-toolkit is running", "version": __version__}
